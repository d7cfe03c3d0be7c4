#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plumesearch/scenario.hpp"

namespace plumesearch {

struct StepRecord {
  int step = 0;
  double time_s = 0.0;
  WorldPoint position;
  double value = 0.0;
  bool detected = false;
  WorldPoint posterior_mean;
  double loc_std = 0.0;
  double rmse = 0.0;
  int n_candidates = 0;       // of the plan that led to this sample
  double chosen_utility = 0.0;
  bool fallback = false;
  bool jumped = false;
};

enum class EpisodeStatus { completed, failed };

struct EpisodeLog {
  std::string scenario;
  std::string planner;
  int source_id = 0;
  int start_id = 0;
  std::uint64_t seed = 0;
  EpisodeStatus status = EpisodeStatus::completed;
  std::string error;
  std::vector<StepRecord> steps;
  int degenerate_updates = 0;
  int planner_shortfalls = 0;
  int fallbacks = 0;

  // First sampling event (time <= budget) with rmse below the radius.
  std::optional<double> first_success_time(double radius, double budget) const;
};

// What a planning step hands back to the episode loop.
struct PlanResult {
  std::vector<WorldPoint> waypoints;  // empty = no candidates (fallback)
  int n_candidates = 0;
  double utility = 0.0;
  bool jumped = false;
  int shortfall = 0;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual PlanResult plan(const ParticleSet& ps, const WorldPoint& position, Rng& rng) = 0;
};

using PlannerFactory =
    std::function<std::unique_ptr<Planner>(const ScenarioConfig&, const OccupancyGrid&)>;

// Optional per-episode artifacts behind the CLI dump flags.
struct DumpOptions {
  bool posterior = false;
  bool distribution = false;
  bool tree = false;
  bool utility = false;
};

struct EpisodeArtifacts {
  std::string posterior_csv;
  std::string distribution_csv;
  std::string tree_csv;
  std::string utility_csv;
};

EpisodeLog run_episode(const ScenarioConfig& cfg, const PlannerFactory& factory = {},
                       const DumpOptions* dumps = nullptr, EpisodeArtifacts* artifacts = nullptr);

struct Aggregate {
  int runs = 0;
  int successes = 0;
  double sr = 0.0;
  double mst = 0.0;  // mean over successful runs; budget when none succeeded
};

struct Metrics {
  double success_radius = 50.0;
  double budget_s = 3600.0;
  double lattice_s = 60.0;
  std::uint64_t master_seed = 0;
  std::map<std::string, Aggregate> overall;                          // planner
  std::map<std::string, std::map<std::string, Aggregate>> per_source;  // planner -> source
  std::vector<double> lattice;
  std::map<std::string, std::vector<std::pair<double, double>>> curves;  // planner -> (mean, std)
};

struct MonteCarloResult {
  std::vector<EpisodeLog> episodes;  // fixed enumeration order
  Metrics metrics;
};

MonteCarloResult run_monte_carlo(const SweepSpec& spec, const PlannerFactory& factory = {});

// Recompute SR/MST and curves from raw logs (also the independent cross-check
// used by the test suite).
Metrics compute_metrics(const std::vector<EpisodeLog>& episodes, double success_radius, double budget_s,
                        double lattice_s, std::uint64_t master_seed);

// metrics.json, rmse_curves.csv, episodes/<id>.csv and summary.md.
void emit_outputs(const MonteCarloResult& result, const std::string& out_dir);

std::string episode_csv(const EpisodeLog& log);
std::string metrics_json(const Metrics& metrics);
std::string rmse_curves_csv(const Metrics& metrics);

// Appendix-style Entrotaxis-Jump tuning sweep.
struct TuneJumpCell {
  int n_jump = 0;
  int m_jump = 0;
  int runs = 0;
  int successes = 0;
  double sr = 0.0;
  double mst = 0.0;
  double score = 0.0;
};

struct TuneJumpResult {
  std::vector<int> n_values;
  std::vector<int> m_values;
  std::vector<TuneJumpCell> cells;  // n-major order
};

TuneJumpResult tune_jump(const SweepSpec& spec, const std::vector<int>& n_values, const std::vector<int>& m_values);
std::string tune_jump_csv(const TuneJumpResult& result);

}  // namespace plumesearch
