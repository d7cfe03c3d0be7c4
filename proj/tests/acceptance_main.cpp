// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the exit
// code is the number of failures. `--only 1,3,9` restricts the run while
// debugging, `--out DIR` keeps the benchmark artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "plumesearch/harness.hpp"
#include "support/oracles.hpp"

using namespace plumesearch;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// The desk-scale benchmark scenario: a 240x160 surrogate urban map at 5 m
// cells with a canyon around source 3 and an open neighbourhood for source 1.

MapSpec benchmark_map() {
  MapSpec spec;
  spec.rows = 160;
  spec.cols = 240;
  spec.cell_size = 5.0;
  spec.blocks = 55;
  spec.block_min = 20.0;
  spec.block_max = 70.0;
  spec.map_seed = 20260810;
  // Street-canyon walls flanking source 3.
  spec.walls.push_back({470.0, 268.0, 620.0, 288.0});
  spec.walls.push_back({470.0, 312.0, 620.0, 332.0});
  // Sources and the five start positions stay clear of random blocks.
  spec.keep_free.push_back({466.0, 392.0, 40.0});  // source 1: open surroundings
  spec.keep_free.push_back({475.0, 376.0, 12.0});  // source 2
  spec.keep_free.push_back({534.0, 300.0, 10.0});  // source 3: inside the canyon
  spec.keep_free.push_back({1100.0, 50.0, 12.0});
  spec.keep_free.push_back({1100.0, 325.0, 12.0});
  spec.keep_free.push_back({1100.0, 650.0, 12.0});
  spec.keep_free.push_back({100.0, 50.0, 12.0});
  spec.keep_free.push_back({100.0, 650.0, 12.0});
  return spec;
}

SourceTerm benchmark_source(double x, double y, double q_gps) {
  SourceTerm t;
  t.s_x = x;
  t.s_y = y;
  t.q = q_gps;
  t.u = 2.5;
  t.phi = 270.0;
  t.d = 1.0;
  t.tau = 8.0;
  return t;
}

SweepSpec benchmark_sweep(int workers) {
  SweepSpec spec;
  spec.base.name = "benchmark";
  spec.base.map = benchmark_map();
  spec.base.mode = PlumeMode::geodesic;
  spec.base.noise_sigma = 0.2;
  spec.base.sensor_threshold = 0.01;
  spec.base.pf.n = 5000;  // desk-scale particle count
  spec.base.lik_sigma = 0.3;
  spec.base.n_z = 40;
  spec.base.budget_s = 3600.0;
  spec.base.velocity = 2.0;
  spec.base.dwell_s = 5.0;
  spec.base.success_radius = 50.0;
  spec.base.lattice_s = 60.0;
  spec.planners = {PlannerKind::entrotaxis, PlannerKind::jump, PlannerKind::uniform_tree,
                   PlannerKind::informed_tree};
  spec.sources = {{"1", benchmark_source(466.0, 392.0, 1110.0)},
                  {"2", benchmark_source(475.0, 376.0, 1140.0)},
                  {"3", benchmark_source(534.0, 300.0, 1000.0)}};
  spec.starts = {{1100.0, 50.0}, {1100.0, 325.0}, {1100.0, 650.0}, {100.0, 50.0}, {100.0, 650.0}};
  spec.repeats = 30;
  spec.master_seed = 2026;
  spec.workers = workers;
  return spec;
}

struct Context {
  std::string out_dir = "acceptance_out";
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::optional<MonteCarloResult> benchmark;

  const MonteCarloResult& benchmark_result() {
    if (!benchmark) {
      std::cerr << "  running the benchmark sweep (" << 4 * 3 * 5 * 30 << " episodes, workers=" << workers
                << ") ..." << std::endl;
      const auto t0 = std::chrono::steady_clock::now();
      benchmark = run_monte_carlo(benchmark_sweep(workers));
      emit_outputs(*benchmark, out_dir);
      const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << "  benchmark sweep finished in " << dt << " s" << std::endl;
    }
    return *benchmark;
  }
};

// ---------------------------------------------------------------------------
// Criterion 1: Dijkstra vs brute force, 50 maps <= 12x12, exact, < 5 s.

bool criterion_dijkstra(Context&, std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  std::uniform_int_distribution<int> usize(4, 12);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = usize(rng), cols = usize(rng);
    const OccupancyGrid grid = testing::random_map(rows, cols, 1.0, 0.25, rng);
    std::vector<CellIndex> sources;
    if (trial % 2 == 0) {
      sources = inlet_states(grid, 270.0);
    } else {
      std::uniform_int_distribution<int> ur(0, rows - 1), uc(0, cols - 1);
      sources = {{ur(rng), uc(rng)}};
    }
    for (bool respect : {true, false}) {
      const CostField field = dijkstra_cost(grid, sources, respect);
      const auto oracle = testing::oracle_grid_costs(grid, sources, respect);
      for (int id = 0; id < rows * cols; ++id) {
        const double a = field.cost[static_cast<std::size_t>(id)];
        const double b = oracle[static_cast<std::size_t>(id)];
        if (std::isinf(a) != std::isinf(b) || (std::isfinite(a) && std::abs(a - b) > 1e-9)) {
          detail = "mismatch on trial " + std::to_string(trial);
          return false;
        }
      }
    }
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail = "50 maps exact, " + std::to_string(elapsed) + " s";
  return elapsed < 5.0;
}

// ---------------------------------------------------------------------------
// Criterion 2: utility vs exhaustive enumeration to 1e-12.

long double oracle_density(const Measurement& z, const SourceTerm& theta, const LikelihoodModel& model) {
  const long double log_c = log_expected_concentration(z.position, theta, model.rho_min);
  if (z.detected) {
    const long double t = (std::log((long double)z.value) - log_c) / model.sigma;
    return std::exp(-0.5L * t * t) / (z.value * model.sigma * std::sqrt(2.0L * (long double)kPi));
  }
  return 0.5L * std::erfc((log_c - std::log((long double)model.threshold)) / (model.sigma * std::sqrt(2.0L)));
}

bool criterion_utility_oracle(Context&, std::string& detail) {
  const LikelihoodModel model{0.3, 0.05, 1.0};
  Rng rng(2020);
  std::uniform_int_distribution<int> un(2, 10), unz(1, 4), ubit(0, 1);
  std::uniform_real_distribution<double> coord(-30.0, 30.0), uw(0.05, 1.0), uq(100.0, 3000.0);
  std::uniform_real_distribution<double> uu(0.0, 4.0), uphi(0.0, 360.0), ud(0.3, 3.0), ut(2.0, 15.0);

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = un(rng);
    ParticleSet ps;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      SourceTerm t;
      t.s_x = coord(rng);
      t.s_y = coord(rng);
      t.q = uq(rng);
      t.u = uu(rng);
      t.phi = uphi(rng);
      t.d = ud(rng);
      t.tau = ut(rng);
      ps.particles.push_back(t);
      ps.weights.push_back(uw(rng));
      total += ps.weights.back();
    }
    for (double& w : ps.weights) w /= total;

    const WorldPoint cand{coord(rng), coord(rng)};
    const int n_z = std::min(unz(rng), n);
    std::vector<Measurement> z_hat;
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int l = 0; l < n_z; ++l) {
      const double c = expected_concentration(cand, ps.particles[static_cast<std::size_t>(pick(rng))], model.rho_min);
      const double value = c * (ubit(rng) ? 2.0 : 0.5);
      Measurement z;
      z.position = cand;
      z.detected = value >= model.threshold;
      z.value = z.detected ? value : 0.0;
      z_hat.push_back(z);
    }

    long double psi = 0.0L;
    for (const Measurement& z : z_hat) {
      std::vector<long double> u(static_cast<std::size_t>(n));
      long double sum = 0.0L;
      for (int i = 0; i < n; ++i) {
        u[static_cast<std::size_t>(i)] =
            ps.weights[static_cast<std::size_t>(i)] * oracle_density(z, ps.particles[static_cast<std::size_t>(i)], model);
        sum += u[static_cast<std::size_t>(i)];
      }
      long double h = 0.0L;
      if (sum > 0.0L) {
        for (int i = 0; i < n; ++i) {
          const long double p = u[static_cast<std::size_t>(i)] / sum;
          if (p > 0.0L) h += p * std::log(p);
        }
      } else {
        for (double w : ps.weights) h += (long double)w * std::log((long double)w);
      }
      psi += h;
    }
    const double want = static_cast<double>(psi / z_hat.size());
    const double got = entrotaxis_utility(ps, z_hat, model);
    worst = std::max(worst, std::abs(got - want));
  }
  detail = "max |Psi - oracle| = " + std::to_string(worst);
  return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// Criterion 3: plume lambda value and concentration bound.

bool criterion_plume(Context&, std::string& detail) {
  if (std::abs(plume_lambda(1.0, 8.0, 2.5) - 0.7698) > 1e-4) {
    detail = "lambda(1,8,2.5) off";
    return false;
  }
  const double rho_min = 2.5;
  Rng rng(33);
  std::uniform_real_distribution<double> coord(-500.0, 500.0), uu(0.0, 8.0), ud(0.05, 4.0), ut(0.5, 20.0);
  std::uniform_real_distribution<double> uq(1.0, 5000.0), uphi(0.0, 360.0);
  int violations = 0;
  for (int i = 0; i < 100000; ++i) {
    SourceTerm t;
    t.s_x = coord(rng);
    t.s_y = coord(rng);
    t.q = uq(rng);
    t.u = uu(rng);
    t.phi = uphi(rng);
    t.d = ud(rng);
    t.tau = ut(rng);
    const WorldPoint p{coord(rng), coord(rng)};
    const double rho_c = std::max(distance(p, {t.s_x, t.s_y}), rho_min);
    const double bound = t.q / (4.0 * kPi * t.d * rho_c);
    if (expected_concentration(p, t, rho_min) > bound * (1.0 + 1e-12)) ++violations;
  }
  detail = "lambda ok, " + std::to_string(violations) + " bound violations in 1e5 draws";
  return violations == 0;
}

// ---------------------------------------------------------------------------
// Criterion 4: tree invariants over 200 random (map, seed) pairs.

bool criterion_tree_invariants(Context&, std::string& detail) {
  Rng rng(404);
  PlannerConfig cfg;
  cfg.n_samples = 150;
  cfg.sigma_count = 12;
  std::uniform_real_distribution<double> coord(0.0, 25.0);
  int checked = 0;

  for (int trial = 0; trial < 400 && checked < 200; ++trial) {
    const OccupancyGrid grid = testing::random_map(25, 25, 1.0, 0.18, rng);
    const WorldPoint root{coord(rng), coord(rng)};
    if (!is_free(grid, root)) continue;
    const WorldPoint goal{coord(rng), coord(rng)};
    const SampleDistribution dist = build_uniform_distribution(grid);
    const auto samples = draw_samples(dist, grid, cfg.n_samples, rng);
    const Tree tree = build_candidate_tree(samples, root, goal, 4.0, grid, dist, cfg, rng);
    ++checked;

    if (tree.parent[0] != -1 || tree.cost[0] != 0.0) {
      detail = "root bookkeeping broken";
      return false;
    }
    for (int v = 1; v < tree.size(); ++v) {
      const int p = tree.parent[static_cast<std::size_t>(v)];
      if (p < 0 || p >= tree.size()) {
        detail = "dangling parent";
        return false;
      }
      int u = v, hops = 0;
      while (u != 0 && hops <= tree.size()) {
        u = tree.parent[static_cast<std::size_t>(u)];
        ++hops;
      }
      if (u != 0) {
        detail = "cycle detected";
        return false;
      }
      const double edge =
          distance(tree.points[static_cast<std::size_t>(v)], tree.points[static_cast<std::size_t>(p)]);
      if (std::abs(tree.cost[static_cast<std::size_t>(v)] - tree.cost[static_cast<std::size_t>(p)] - edge) > 1e-9) {
        detail = "cost bookkeeping broken";
        return false;
      }
      if (!segment_free(grid, tree.points[static_cast<std::size_t>(p)], tree.points[static_cast<std::size_t>(v)])) {
        detail = "colliding edge";
        return false;
      }
      if (tree.g_hat(tree.points[static_cast<std::size_t>(v)]) > tree.cost[static_cast<std::size_t>(v)] + 1e-9) {
        detail = "g_hat exceeds tree cost";
        return false;
      }
    }
    if (tree.blossom_shortfall == 0 && tree.size() != cfg.sigma_count + 1) {
      detail = "groomed tree size off: " + std::to_string(tree.size());
      return false;
    }
  }
  detail = std::to_string(checked) + " trees, zero violations";
  return checked == 200;
}

// ---------------------------------------------------------------------------
// Criterion 5: wake down-weighting on a single-block map.

bool criterion_wake(Context&, std::string& detail) {
  OccupancyGrid grid = OccupancyGrid::make(40, 40, 1.0);
  for (int r = 15; r < 25; ++r) {
    for (int c = 10; c < 14; ++c) grid.set_occupied(r, c, true);
  }
  const SampleDistribution dist = build_distribution(grid, 270.0);
  // Lee strip: the block's shadow rows just downwind; open strip: the same
  // columns in undisturbed flow beside it.
  double lee = 0.0, open = 0.0;
  int lee_n = 0, open_n = 0;
  for (int r = 16; r < 24; ++r) {
    for (int c = 14; c < 25; ++c) {
      lee += dist.weight_at(r, c);
      ++lee_n;
    }
  }
  for (int r = 3; r < 11; ++r) {
    for (int c = 14; c < 25; ++c) {
      open += dist.weight_at(r, c);
      ++open_n;
    }
  }
  const double ratio = (lee / lee_n) / (open / open_n);
  detail = "lee/open weight ratio = " + std::to_string(ratio);
  return ratio < 0.7;
}

// ---------------------------------------------------------------------------
// Criteria 6-8: the desk-scale benchmark.

bool criterion_benchmark(Context& ctx, std::string& detail) {
  const Metrics& m = ctx.benchmark_result().metrics;
  const Aggregate& entro = m.overall.at("entrotaxis");
  const Aggregate& jump = m.overall.at("jump");
  const Aggregate& uniform = m.overall.at("uniform_tree");
  const Aggregate& informed = m.overall.at("informed_tree");

  std::ostringstream os;
  os << "SR entro/jump/uniform/informed = " << entro.sr << "/" << jump.sr << "/" << uniform.sr << "/" << informed.sr
     << ", MST = " << entro.mst << "/" << jump.mst << "/" << uniform.mst << "/" << informed.mst;
  detail = os.str();

  bool ok = true;
  ok &= informed.sr >= uniform.sr;
  ok &= uniform.sr >= jump.sr;
  ok &= jump.sr >= entro.sr - 0.05;
  ok &= informed.sr - entro.sr >= 0.10;
  ok &= entro.successes > 0 && informed.mst < 0.85 * entro.mst;
  return ok;
}

bool criterion_difficulty_gradient(Context& ctx, std::string& detail) {
  const Metrics& m = ctx.benchmark_result().metrics;
  const double adv_open =
      m.per_source.at("informed_tree").at("s1").sr - m.per_source.at("uniform_tree").at("s1").sr;
  const double adv_canyon =
      m.per_source.at("informed_tree").at("s3").sr - m.per_source.at("uniform_tree").at("s3").sr;
  std::ostringstream os;
  os << "informed-vs-uniform SR advantage: open source " << adv_open << ", canyon source " << adv_canyon;
  detail = os.str();
  return adv_canyon >= adv_open;
}

bool criterion_rmse_curves(Context& ctx, std::string& detail) {
  ctx.benchmark_result();
  std::ifstream in(std::filesystem::path(ctx.out_dir) / "rmse_curves.csv");
  if (!in) {
    detail = "rmse_curves.csv missing";
    return false;
  }
  std::string header;
  std::getline(in, header);
  std::vector<std::string> cols;
  std::istringstream hs(header);
  std::string tok;
  while (std::getline(hs, tok, ',')) cols.push_back(tok);
  if (cols.size() != 9 || cols[0] != "time_s") {
    detail = "expected 1 + 4x2 columns, got " + std::to_string(cols.size());
    return false;
  }
  for (const char* planner : {"entrotaxis", "jump", "uniform_tree", "informed_tree"}) {
    bool has_mean = false, has_std = false;
    for (const std::string& c : cols) {
      has_mean |= c == std::string(planner) + "_mean";
      has_std |= c == std::string(planner) + "_std";
    }
    if (!has_mean || !has_std) {
      detail = std::string("missing columns for ") + planner;
      return false;
    }
  }
  double prev_time = -1.0;
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> vals;
    while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != 9) {
      detail = "ragged row";
      return false;
    }
    for (double v : vals) {
      if (!std::isfinite(v)) {
        detail = "non-finite value";
        return false;
      }
    }
    if (vals[0] <= prev_time) {
      detail = "time not strictly increasing";
      return false;
    }
    prev_time = vals[0];
    ++rows;
  }
  detail = std::to_string(rows) + " lattice rows, 9 columns, monotone time";
  return rows == 61;  // 0..3600 at 60 s
}

// ---------------------------------------------------------------------------
// Criterion 9: the jump tuner sweep and the skill-score hand check.

bool criterion_tune_jump(Context& ctx, std::string& detail) {
  {
    const std::vector<double> sr{0.5, 1.0}, mst{2000.0, 1000.0};
    const auto scores = skill_score(sr, mst, 0.5, 0.5);
    if (scores[0] != 0.0 || scores[1] != 1.0) {
      detail = "hand check failed";
      return false;
    }
  }

  SweepSpec spec = benchmark_sweep(ctx.workers);
  spec.base.name = "tune";
  spec.base.pf.n = 2000;
  spec.base.budget_s = 1800.0;
  spec.planners = {PlannerKind::jump};
  spec.sources = {{"2", benchmark_source(475.0, 376.0, 1140.0)}};
  spec.starts = {{1100.0, 325.0}};
  spec.repeats = 10;
  spec.master_seed = 907;

  const std::vector<int> n_values{2, 4, 6, 8, 10};
  const std::vector<int> m_values{10, 12, 14};
  const TuneJumpResult result = tune_jump(spec, n_values, m_values);

  std::filesystem::create_directories(ctx.out_dir);
  const std::string csv = tune_jump_csv(result);
  std::ofstream out(std::filesystem::path(ctx.out_dir) / "jump_skill_grid.csv");
  out << csv;

  if (result.cells.size() != 15) {
    detail = "expected 15 grid cells";
    return false;
  }
  for (const TuneJumpCell& cell : result.cells) {
    if (cell.runs != 10 || cell.score < 0.0 || cell.score > 1.0) {
      detail = "bad cell (n=" + std::to_string(cell.n_jump) + ", m=" + std::to_string(cell.m_jump) + ")";
      return false;
    }
  }
  detail = "15-cell score grid emitted";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 10: sweep determinism across worker counts.

bool criterion_determinism(Context&, std::string& detail) {
  SweepSpec spec;
  spec.base.name = "det";
  spec.base.map = benchmark_map();
  spec.base.mode = PlumeMode::geodesic;
  spec.base.pf.n = 500;
  spec.base.budget_s = 400.0;
  spec.base.tree.n_samples = 500;
  spec.planners = {PlannerKind::entrotaxis, PlannerKind::informed_tree};
  spec.sources = {{"2", benchmark_source(475.0, 376.0, 1140.0)}};
  spec.starts = {{1100.0, 325.0}};
  spec.repeats = 2;
  spec.master_seed = 555;

  spec.workers = 1;
  const MonteCarloResult serial = run_monte_carlo(spec);
  spec.workers = 3;
  const MonteCarloResult threaded = run_monte_carlo(spec);

  if (metrics_json(serial.metrics) != metrics_json(threaded.metrics)) {
    detail = "metrics.json differs between worker counts";
    return false;
  }
  for (std::size_t i = 0; i < serial.episodes.size(); ++i) {
    if (episode_csv(serial.episodes[i]) != episode_csv(threaded.episodes[i])) {
      detail = "episode " + std::to_string(i) + " differs";
      return false;
    }
  }
  detail = "byte-identical metrics.json with 1 and 3 workers";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::istringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.push_back(std::stoi(tok));
    } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      ctx.out_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
      ctx.workers = std::stoi(argv[++i]);
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<bool(Context&, std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Dijkstra matches brute force on 50 random maps", criterion_dijkstra},
      {2, "Entrotaxis utility matches exhaustive enumeration", criterion_utility_oracle},
      {3, "plume lambda value and concentration bound", criterion_plume},
      {4, "tree invariants over 200 random (map, seed) pairs", criterion_tree_invariants},
      {5, "wake cells are down-weighted on a single-block map", criterion_wake},
      {6, "benchmark: SR ordering and MST gap across planners", criterion_benchmark},
      {7, "benchmark: informed advantage grows with model mismatch", criterion_difficulty_gradient},
      {8, "rmse_curves.csv has the 4-planner lattice shape", criterion_rmse_curves},
      {9, "tune-jump emits the 5x3 skill-score grid", criterion_tune_jump},
      {10, "sweep output is identical across worker counts", criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(ctx, detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
  }
  return failures;
}
