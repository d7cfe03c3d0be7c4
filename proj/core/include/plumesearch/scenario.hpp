#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "plumesearch/baselines.hpp"
#include "plumesearch/config.hpp"
#include "plumesearch/inference.hpp"
#include "plumesearch/informed_tree.hpp"

namespace plumesearch {

enum class PlannerKind { entrotaxis, jump, uniform_tree, informed_tree };

PlannerKind planner_from_string(const std::string& s);
std::string to_string(PlannerKind kind);

// Map source: a file, or a procedurally blocked surrogate urban grid.
// Rectangles in `walls` are placed verbatim (canyon geometry); `blocks`
// random rectangles are scattered wherever they do not hit a keep-free disc.
struct MapSpec {
  std::string path;
  int rows = 160;
  int cols = 240;
  double cell_size = 5.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  int blocks = 48;
  double block_min = 20.0;
  double block_max = 70.0;
  std::uint64_t map_seed = 7;
  std::vector<std::array<double, 4>> walls;      // x0 y0 x1 y1
  std::vector<std::array<double, 3>> keep_free;  // x y radius
};

OccupancyGrid build_map(const MapSpec& spec);

// One episode's full wiring; defaults are the reference operating point.
struct ScenarioConfig {
  std::string name = "scenario";
  PlannerKind planner = PlannerKind::informed_tree;
  MapSpec map;
  SourceTerm truth{466.0, 392.0, 0.0, 1110.0, 2.5, 270.0, 1.0, 8.0};
  PlumeMode mode = PlumeMode::geodesic;
  double noise_sigma = 0.2;
  std::string replay_index;
  double sensor_threshold = 0.01;  // g/m^3
  WorldPoint start{1100.0, 325.0};
  PriorSpec prior;
  FilterConfig pf;
  double lik_sigma = 0.3;
  PlannerConfig tree;
  int n_z = 40;
  BaselineConfig baseline;
  double rebuild_deg = 15.0;  // wind drift that forces a distribution rebuild
  bool noiseless_prediction = false;
  double velocity = 2.0;    // m/s
  double budget_s = 3600.0;
  double dwell_s = 5.0;     // per-sample dwell
  double success_radius = 50.0;
  double lattice_s = 60.0;  // RMSE curve resolution
  std::uint64_t seed = 1;
};

ScenarioConfig scenario_from_config(const ConfigFile& cfg);

// Monte Carlo matrix: planners x sources x starts x repeats over one base
// scenario.
struct SweepSpec {
  ScenarioConfig base;
  std::vector<PlannerKind> planners;
  std::vector<std::pair<std::string, SourceTerm>> sources;
  std::vector<WorldPoint> starts;
  int repeats = 30;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

SweepSpec sweep_from_config(const ConfigFile& cfg);

}  // namespace plumesearch
