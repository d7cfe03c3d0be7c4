#include "plumesearch/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace plumesearch {

namespace {

std::string csv_bool(bool b) { return b ? "1" : "0"; }

void append_point_csv(std::string& out, const WorldPoint& p) {
  out += format_double(p.x);
  out += ',';
  out += format_double(p.y);
}

// ---------------------------------------------------------------------------
// Planners

class TreePlanner : public Planner {
 public:
  TreePlanner(const ScenarioConfig& cfg, const OccupancyGrid& grid, bool wind_aware, const DumpOptions* dumps,
              EpisodeArtifacts* artifacts)
      : cfg_(cfg), grid_(grid), wind_aware_(wind_aware), dumps_(dumps), artifacts_(artifacts) {
    model_ = LikelihoodModel{cfg.lik_sigma, cfg.sensor_threshold, grid.cell_size / 2.0};
    if (!wind_aware_) dist_ = build_uniform_distribution(grid_);
  }

  PlanResult plan(const ParticleSet& ps, const WorldPoint& position, Rng& rng) override {
    refresh_distribution(ps);
    if (cfg_.tree.resample_batch || samples_.empty()) {
      samples_ = draw_samples(dist_, grid_, cfg_.tree.n_samples, rng);
    }
    const WorldPoint goal = posterior_mean_location(ps);
    const double sigma_loc = location_std(ps);
    const Tree tree = build_candidate_tree(samples_, position, goal, sigma_loc, grid_, dist_, cfg_.tree, rng);
    if (dumps_ && dumps_->tree && artifacts_) dump_tree(tree);

    const std::vector<CandidatePath> sigma = extract_paths(tree, cfg_.tree);
    PlanResult result;
    result.shortfall = tree.blossom_shortfall;
    result.n_candidates = static_cast<int>(sigma.size());
    if (sigma.empty()) return result;

    std::vector<double> psi;
    const CandidatePath& best =
        select_path(sigma, ps, cfg_.n_z, model_, cfg_.noiseless_prediction, rng, &psi, nullptr);
    if (dumps_ && dumps_->utility && artifacts_) dump_utility(sigma, psi, &best);
    result.utility = psi[static_cast<std::size_t>(&best - sigma.data())];
    result.waypoints.assign(best.waypoints.begin() + 1, best.waypoints.end());
    ++step_;
    return result;
  }

 private:
  void refresh_distribution(const ParticleSet& ps) {
    if (!wind_aware_) return;
    const double phi = posterior_mean_phi(ps);
    if (!built_ || std::abs(angle_diff_deg(phi, dist_.phi_deg)) > cfg_.rebuild_deg) {
      dist_ = build_distribution(grid_, phi);
      built_ = true;
      if (dumps_ && dumps_->distribution && artifacts_) dump_distribution();
    }
  }

  void dump_distribution() {
    std::vector<double> full(static_cast<std::size_t>(grid_.rows) * grid_.cols, 0.0);
    for (std::size_t k = 0; k < dist_.free_cells.size(); ++k) {
      full[static_cast<std::size_t>(dist_.free_cells[k])] = dist_.weights[k];
    }
    std::string& out = artifacts_->distribution_csv;
    out.clear();
    for (int r = 0; r < grid_.rows; ++r) {
      for (int c = 0; c < grid_.cols; ++c) {
        if (c) out += ',';
        out += format_double(full[static_cast<std::size_t>(r) * grid_.cols + c]);
      }
      out += '\n';
    }
  }

  void dump_tree(const Tree& tree) {
    std::string& out = artifacts_->tree_csv;
    if (out.empty()) out = "step,vertex,x,y,parent,cost\n";
    for (int v = 0; v < tree.size(); ++v) {
      out += std::to_string(step_);
      out += ',';
      out += std::to_string(v);
      out += ',';
      append_point_csv(out, tree.points[static_cast<std::size_t>(v)]);
      out += ',';
      out += std::to_string(tree.parent[static_cast<std::size_t>(v)]);
      out += ',';
      out += format_double(tree.cost[static_cast<std::size_t>(v)]);
      out += '\n';
    }
  }

  void dump_utility(const std::vector<CandidatePath>& sigma, const std::vector<double>& psi,
                    const CandidatePath* chosen) {
    std::string& out = artifacts_->utility_csv;
    if (out.empty()) out = "step,candidate,x,y,length,psi,chosen\n";
    for (std::size_t k = 0; k < sigma.size(); ++k) {
      out += std::to_string(step_);
      out += ',';
      out += std::to_string(k);
      out += ',';
      append_point_csv(out, sigma[k].terminal());
      out += ',';
      out += format_double(sigma[k].length);
      out += ',';
      out += format_double(psi[k]);
      out += ',';
      out += csv_bool(&sigma[k] == chosen);
      out += '\n';
    }
  }

  ScenarioConfig cfg_;
  const OccupancyGrid& grid_;
  bool wind_aware_;
  const DumpOptions* dumps_;
  EpisodeArtifacts* artifacts_;
  LikelihoodModel model_;
  SampleDistribution dist_;
  bool built_ = false;
  std::vector<WorldPoint> samples_;
  int step_ = 0;
};

class EntrotaxisPlanner : public Planner {
 public:
  EntrotaxisPlanner(const ScenarioConfig& cfg, const OccupancyGrid& grid, bool jump)
      : cfg_(cfg), grid_(grid), jump_(jump) {
    model_ = LikelihoodModel{cfg.lik_sigma, cfg.sensor_threshold, grid.cell_size / 2.0};
  }

  PlanResult plan(const ParticleSet& ps, const WorldPoint& position, Rng& rng) override {
    const BaselineStep step =
        jump_ ? jump_step(ps, position, grid_, state_, cfg_.n_z, model_, cfg_.noiseless_prediction, cfg_.baseline,
                          rng)
              : entrotaxis_step(ps, position, grid_, cfg_.n_z, model_, cfg_.noiseless_prediction, cfg_.baseline, rng);
    PlanResult result;
    result.n_candidates = step.candidates_evaluated;
    result.utility = step.chosen_utility;
    result.jumped = step.jumped;
    result.waypoints = step.waypoints;  // a stall returns the current position
    return result;
  }

 private:
  ScenarioConfig cfg_;
  const OccupancyGrid& grid_;
  bool jump_;
  LikelihoodModel model_;
  JumpState state_;
};

std::unique_ptr<Planner> make_planner(const ScenarioConfig& cfg, const OccupancyGrid& grid, const DumpOptions* dumps,
                                      EpisodeArtifacts* artifacts) {
  switch (cfg.planner) {
    case PlannerKind::entrotaxis: return std::make_unique<EntrotaxisPlanner>(cfg, grid, false);
    case PlannerKind::jump: return std::make_unique<EntrotaxisPlanner>(cfg, grid, true);
    case PlannerKind::uniform_tree: return std::make_unique<TreePlanner>(cfg, grid, false, dumps, artifacts);
    default: return std::make_unique<TreePlanner>(cfg, grid, true, dumps, artifacts);
  }
}

std::string posterior_csv(const ParticleSet& ps) {
  std::string out = "s_x,s_y,s_z,q,u,phi,d,tau,weight\n";
  for (int i = 0; i < ps.size(); ++i) {
    const SourceTerm& t = ps.particles[static_cast<std::size_t>(i)];
    for (double v : {t.s_x, t.s_y, t.s_z, t.q, t.u, t.phi, t.d, t.tau}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(ps.weights[static_cast<std::size_t>(i)]);
    out += '\n';
  }
  return out;
}

}  // namespace

std::optional<double> EpisodeLog::first_success_time(double radius, double budget) const {
  for (const StepRecord& rec : steps) {
    if (rec.time_s > budget) break;
    if (rec.rmse < radius) return rec.time_s;
  }
  return std::nullopt;
}

EpisodeLog run_episode(const ScenarioConfig& cfg, const PlannerFactory& factory, const DumpOptions* dumps,
                       EpisodeArtifacts* artifacts) {
  EpisodeLog log;
  log.scenario = cfg.name;
  log.planner = to_string(cfg.planner);
  log.seed = cfg.seed;

  const OccupancyGrid grid = build_map(cfg.map);
  if (!is_free(grid, cfg.start)) throw std::runtime_error("scenario: start position is not in free space");

  std::vector<ReplayFrame> frames;
  if (cfg.mode == PlumeMode::replay) frames = load_replay_frames(cfg.replay_index, grid);
  const GroundTruthField field = GroundTruthField::make(cfg.mode, cfg.truth, cfg.noise_sigma, grid, std::move(frames));
  const LikelihoodModel model{cfg.lik_sigma, cfg.sensor_threshold, grid.cell_size / 2.0};
  const WorldPoint s_true{cfg.truth.s_x, cfg.truth.s_y};

  Rng rng(cfg.seed);
  ParticleSet ps = init_prior(cfg.prior, cfg.pf.n, rng);
  std::unique_ptr<Planner> planner =
      factory ? factory(cfg, grid) : make_planner(cfg, grid, dumps, artifacts);

  const double max_step = *std::max_element(cfg.baseline.step_sizes.begin(), cfg.baseline.step_sizes.end());

  double t = 0.0;
  WorldPoint x = cfg.start;
  int step = 0;

  const auto sample_and_update = [&](const PlanResult* plan) {
    const Measurement z = sample_measurement(field, grid, x, cfg.sensor_threshold, rng, t, step);
    const UpdateResult ur = update(ps, z, model, cfg.pf, cfg.prior, rng);
    if (ur.degenerate) ++log.degenerate_updates;

    StepRecord rec;
    rec.step = step;
    rec.time_s = t;
    rec.position = x;
    rec.value = z.value;
    rec.detected = z.detected;
    rec.posterior_mean = posterior_mean_location(ps);
    rec.loc_std = location_std(ps);
    rec.rmse = weighted_rmse(ps, s_true);
    if (plan) {
      rec.n_candidates = plan->n_candidates;
      rec.chosen_utility = plan->utility;
      rec.fallback = plan->waypoints.empty();
      rec.jumped = plan->jumped;
    }
    log.steps.push_back(rec);
  };

  sample_and_update(nullptr);

  while (t < cfg.budget_s) {
    PlanResult plan = planner->plan(ps, x, rng);
    log.planner_shortfalls += plan.shortfall;

    std::vector<WorldPoint> route = plan.waypoints;
    if (route.empty()) {
      // No candidates: wander to a random reachable neighbour within the
      // maximum step size rather than ending the episode.
      ++log.fallbacks;
      std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
      std::uniform_real_distribution<double> radius(0.0, max_step);
      for (int tries = 0; tries < 50 && route.empty(); ++tries) {
        const double a = angle(rng), r = radius(rng);
        const WorldPoint cand = x + WorldPoint{r * std::cos(a), r * std::sin(a)};
        if (segment_free(grid, x, cand)) route.push_back(cand);
      }
      if (route.empty()) route.push_back(x);  // boxed in; re-sample in place
    }

    double length = 0.0;
    WorldPoint prev = x;
    for (const WorldPoint& wp : route) {
      length += distance(prev, wp);
      prev = wp;
    }
    x = route.back();
    double advance = length / cfg.velocity + cfg.dwell_s;
    if (!(advance > 0.0)) advance = 1.0;  // stalled with zero dwell; keep time moving
    t += advance;
    ++step;
    sample_and_update(&plan);
  }

  if (dumps && dumps->posterior && artifacts) artifacts->posterior_csv = posterior_csv(ps);
  return log;
}

Metrics compute_metrics(const std::vector<EpisodeLog>& episodes, double success_radius, double budget_s,
                        double lattice_s, std::uint64_t master_seed) {
  Metrics m;
  m.success_radius = success_radius;
  m.budget_s = budget_s;
  m.lattice_s = lattice_s;
  m.master_seed = master_seed;

  for (double t = 0.0; t <= budget_s + 1e-9; t += lattice_s) m.lattice.push_back(t);

  struct Bucket {
    std::vector<const EpisodeLog*> logs;
  };
  std::map<std::string, Bucket> by_planner;
  std::map<std::string, std::map<std::string, Bucket>> by_planner_source;
  for (const EpisodeLog& log : episodes) {
    by_planner[log.planner].logs.push_back(&log);
    by_planner_source[log.planner]["s" + std::to_string(log.source_id)].logs.push_back(&log);
  }

  const auto aggregate = [&](const Bucket& bucket) {
    Aggregate agg;
    double mst_sum = 0.0;
    for (const EpisodeLog* log : bucket.logs) {
      ++agg.runs;
      if (log->status != EpisodeStatus::completed) continue;
      if (const auto ts = log->first_success_time(success_radius, budget_s)) {
        ++agg.successes;
        mst_sum += *ts;
      }
    }
    agg.sr = agg.runs > 0 ? static_cast<double>(agg.successes) / agg.runs : 0.0;
    agg.mst = agg.successes > 0 ? mst_sum / agg.successes : budget_s;
    return agg;
  };

  for (const auto& [planner, bucket] : by_planner) {
    m.overall[planner] = aggregate(bucket);

    // Carry-forward RMSE sampled on the lattice, averaged across runs.
    std::vector<double> mean(m.lattice.size(), 0.0), sq(m.lattice.size(), 0.0);
    int count = 0;
    for (const EpisodeLog* log : bucket.logs) {
      if (log->status != EpisodeStatus::completed || log->steps.empty()) continue;
      ++count;
      std::size_t k = 0;
      double current = log->steps.front().rmse;
      for (std::size_t j = 0; j < m.lattice.size(); ++j) {
        while (k < log->steps.size() && log->steps[k].time_s <= m.lattice[j]) {
          current = log->steps[k].rmse;
          ++k;
        }
        mean[j] += current;
        sq[j] += current * current;
      }
    }
    std::vector<std::pair<double, double>> curve(m.lattice.size(), {0.0, 0.0});
    if (count > 0) {
      for (std::size_t j = 0; j < m.lattice.size(); ++j) {
        const double mu = mean[j] / count;
        const double var = std::max(0.0, sq[j] / count - mu * mu);
        curve[j] = {mu, std::sqrt(var)};
      }
    }
    m.curves[planner] = std::move(curve);
  }
  for (const auto& [planner, sources] : by_planner_source) {
    for (const auto& [source, bucket] : sources) m.per_source[planner][source] = aggregate(bucket);
  }
  return m;
}

MonteCarloResult run_monte_carlo(const SweepSpec& spec, const PlannerFactory& factory) {
  std::vector<ScenarioConfig> configs;
  for (const PlannerKind planner : spec.planners) {
    for (std::size_t si = 0; si < spec.sources.size(); ++si) {
      for (std::size_t pi = 0; pi < spec.starts.size(); ++pi) {
        for (int rep = 0; rep < spec.repeats; ++rep) {
          ScenarioConfig cfg = spec.base;
          cfg.planner = planner;
          cfg.truth = spec.sources[si].second;
          cfg.start = spec.starts[pi];
          const std::size_t index = configs.size();
          cfg.seed = derive_seed(spec.master_seed, index);
          cfg.name = to_string(planner) + "_s" + spec.sources[si].first + "_p" + std::to_string(pi + 1) + "_r" +
                     std::to_string(rep + 1);
          configs.push_back(std::move(cfg));
        }
      }
    }
  }

  std::vector<EpisodeLog> episodes(configs.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, spec.workers);

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) break;
      EpisodeLog log;
      try {
        log = run_episode(configs[i], factory);
      } catch (const std::exception& e) {
        log.status = EpisodeStatus::failed;
        log.error = e.what();
      }
      log.scenario = configs[i].name;
      log.planner = to_string(configs[i].planner);
      log.seed = configs[i].seed;
      // Recover the matrix coordinates from the enumeration order.
      const std::size_t per_planner = spec.sources.size() * spec.starts.size() * spec.repeats;
      const std::size_t within = i % per_planner;
      log.source_id = static_cast<int>(within / (spec.starts.size() * spec.repeats)) + 1;
      log.start_id = static_cast<int>((within / spec.repeats) % spec.starts.size()) + 1;
      episodes[i] = std::move(log);
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  MonteCarloResult result;
  result.metrics = compute_metrics(episodes, spec.base.success_radius, spec.base.budget_s, spec.base.lattice_s,
                                   spec.master_seed);
  result.episodes = std::move(episodes);
  return result;
}

std::string episode_csv(const EpisodeLog& log) {
  std::string out =
      "step,time_s,x,y,value,detected,post_mean_x,post_mean_y,loc_std,rmse,n_candidates,chosen_utility,fallback,"
      "jumped\n";
  for (const StepRecord& rec : log.steps) {
    out += std::to_string(rec.step);
    out += ',';
    out += format_double(rec.time_s);
    out += ',';
    append_point_csv(out, rec.position);
    out += ',';
    out += format_double(rec.value);
    out += ',';
    out += csv_bool(rec.detected);
    out += ',';
    append_point_csv(out, rec.posterior_mean);
    out += ',';
    out += format_double(rec.loc_std);
    out += ',';
    out += format_double(rec.rmse);
    out += ',';
    out += std::to_string(rec.n_candidates);
    out += ',';
    out += format_double(rec.chosen_utility);
    out += ',';
    out += csv_bool(rec.fallback);
    out += ',';
    out += csv_bool(rec.jumped);
    out += '\n';
  }
  return out;
}

std::string metrics_json(const Metrics& metrics) {
  nlohmann::json j;
  j["success_radius_m"] = metrics.success_radius;
  j["budget_s"] = metrics.budget_s;
  j["lattice_s"] = metrics.lattice_s;
  j["master_seed"] = metrics.master_seed;
  for (const auto& [planner, agg] : metrics.overall) {
    nlohmann::json a;
    a["runs"] = agg.runs;
    a["successes"] = agg.successes;
    a["sr"] = agg.sr;
    a["mst_s"] = agg.mst;
    j["overall"][planner] = std::move(a);
  }
  for (const auto& [planner, sources] : metrics.per_source) {
    for (const auto& [source, agg] : sources) {
      nlohmann::json a;
      a["runs"] = agg.runs;
      a["successes"] = agg.successes;
      a["sr"] = agg.sr;
      a["mst_s"] = agg.mst;
      j["per_source"][planner][source] = std::move(a);
    }
  }
  return j.dump(2) + "\n";
}

std::string rmse_curves_csv(const Metrics& metrics) {
  std::string out = "time_s";
  for (const auto& [planner, _] : metrics.curves) {
    out += ',';
    out += planner + "_mean";
    out += ',';
    out += planner + "_std";
  }
  out += '\n';
  for (std::size_t j = 0; j < metrics.lattice.size(); ++j) {
    out += format_double(metrics.lattice[j]);
    for (const auto& [planner, curve] : metrics.curves) {
      out += ',';
      out += format_double(curve[j].first);
      out += ',';
      out += format_double(curve[j].second);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string summary_markdown(const Metrics& metrics) {
  std::ostringstream os;
  os << "# Sweep summary\n\n";
  os << "Success: weighted RMSE < " << metrics.success_radius << " m within " << metrics.budget_s << " s.\n\n";
  os << "## Overall\n\n| Planner | SR | MST (s) | Runs |\n|---|---|---|---|\n";
  for (const auto& [planner, agg] : metrics.overall) {
    os << "| " << planner << " | " << agg.sr << " | " << agg.mst << " | " << agg.runs << " |\n";
  }
  os << "\n## Per source\n\n| Planner | Source | SR | MST (s) |\n|---|---|---|---|\n";
  for (const auto& [planner, sources] : metrics.per_source) {
    for (const auto& [source, agg] : sources) {
      os << "| " << planner << " | " << source << " | " << agg.sr << " | " << agg.mst << " |\n";
    }
  }
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path.string());
  out << content;
}

}  // namespace

void emit_outputs(const MonteCarloResult& result, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir / "episodes");
  write_file(dir / "metrics.json", metrics_json(result.metrics));
  write_file(dir / "rmse_curves.csv", rmse_curves_csv(result.metrics));
  write_file(dir / "summary.md", summary_markdown(result.metrics));
  for (const EpisodeLog& log : result.episodes) {
    write_file(dir / "episodes" / (log.scenario + ".csv"), episode_csv(log));
  }
}

TuneJumpResult tune_jump(const SweepSpec& spec, const std::vector<int>& n_values, const std::vector<int>& m_values) {
  TuneJumpResult result;
  result.n_values = n_values;
  result.m_values = m_values;

  std::vector<double> sr, mst;
  for (const int n_jump : n_values) {
    for (const int m_jump : m_values) {
      SweepSpec cell = spec;
      cell.planners = {PlannerKind::jump};
      cell.base.baseline.n_jump = n_jump;
      cell.base.baseline.m_jump = m_jump;
      // Decorrelate cells while keeping the whole sweep reproducible.
      cell.master_seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(n_jump) * 1000 + m_jump);
      const MonteCarloResult mc = run_monte_carlo(cell);
      const Aggregate& agg = mc.metrics.overall.at("jump");

      TuneJumpCell out;
      out.n_jump = n_jump;
      out.m_jump = m_jump;
      out.runs = agg.runs;
      out.successes = agg.successes;
      out.sr = agg.sr;
      out.mst = agg.mst;
      result.cells.push_back(out);
      sr.push_back(agg.sr);
      mst.push_back(agg.mst);
    }
  }
  const std::vector<double> scores = skill_score(sr, mst, 0.5, 0.5);
  for (std::size_t i = 0; i < scores.size(); ++i) result.cells[i].score = scores[i];
  return result;
}

std::string tune_jump_csv(const TuneJumpResult& result) {
  std::string out = "n_jump,m_jump,runs,successes,sr,mst_s,score\n";
  for (const TuneJumpCell& cell : result.cells) {
    out += std::to_string(cell.n_jump);
    out += ',';
    out += std::to_string(cell.m_jump);
    out += ',';
    out += std::to_string(cell.runs);
    out += ',';
    out += std::to_string(cell.successes);
    out += ',';
    out += format_double(cell.sr);
    out += ',';
    out += format_double(cell.mst);
    out += ',';
    out += format_double(cell.score);
    out += '\n';
  }
  return out;
}

}  // namespace plumesearch
