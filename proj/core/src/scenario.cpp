#include "plumesearch/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace plumesearch {

PlannerKind planner_from_string(const std::string& s) {
  if (s == "entrotaxis") return PlannerKind::entrotaxis;
  if (s == "jump") return PlannerKind::jump;
  if (s == "uniform_tree") return PlannerKind::uniform_tree;
  if (s == "informed_tree") return PlannerKind::informed_tree;
  throw std::runtime_error("unknown planner: " + s);
}

std::string to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::entrotaxis: return "entrotaxis";
    case PlannerKind::jump: return "jump";
    case PlannerKind::uniform_tree: return "uniform_tree";
    default: return "informed_tree";
  }
}

namespace {

void fill_rect(OccupancyGrid& grid, double x0, double y0, double x1, double y1) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const WorldPoint center = grid.cell_center(r, c);
      if (center.x >= x0 && center.x <= x1 && center.y >= y0 && center.y <= y1) grid.set_occupied(r, c, true);
    }
  }
}

bool rect_hits_disc(double x0, double y0, double x1, double y1, double cx, double cy, double radius) {
  const double nx = std::clamp(cx, x0, x1);
  const double ny = std::clamp(cy, y0, y1);
  const double dx = cx - nx, dy = cy - ny;
  return dx * dx + dy * dy <= radius * radius;
}

}  // namespace

OccupancyGrid build_map(const MapSpec& spec) {
  if (!spec.path.empty()) return load_map(spec.path);

  OccupancyGrid grid = OccupancyGrid::make(spec.rows, spec.cols, spec.cell_size, spec.origin_x, spec.origin_y);
  for (const auto& w : spec.walls) fill_rect(grid, w[0], w[1], w[2], w[3]);

  Rng rng(spec.map_seed);
  std::uniform_real_distribution<double> ux(spec.origin_x, spec.origin_x + spec.cols * spec.cell_size);
  std::uniform_real_distribution<double> uy(spec.origin_y, spec.origin_y + spec.rows * spec.cell_size);
  std::uniform_real_distribution<double> usize(spec.block_min, spec.block_max);
  for (int b = 0; b < spec.blocks; ++b) {
    const double w = usize(rng), h = usize(rng);
    const double cx = ux(rng), cy = uy(rng);
    const double x0 = cx - w / 2, x1 = cx + w / 2;
    const double y0 = cy - h / 2, y1 = cy + h / 2;
    bool blocked = false;
    for (const auto& kf : spec.keep_free) blocked |= rect_hits_disc(x0, y0, x1, y1, kf[0], kf[1], kf[2]);
    if (blocked) continue;
    fill_rect(grid, x0, y0, x1, y1);
  }

  // Guarantee the keep-free discs regardless of wall placement.
  for (const auto& kf : spec.keep_free) {
    for (int r = 0; r < grid.rows; ++r) {
      for (int c = 0; c < grid.cols; ++c) {
        const WorldPoint center = grid.cell_center(r, c);
        const double dx = center.x - kf[0], dy = center.y - kf[1];
        if (dx * dx + dy * dy <= kf[2] * kf[2]) grid.set_occupied(r, c, false);
      }
    }
  }
  return grid;
}

namespace {

// Two parameters with an optional leading family word, e.g. "normal 600 100"
// or "gamma 2 1000" or just "600 100".
std::vector<double> dist_params(const ConfigFile& cfg, const std::string& key, const char* family,
                                const std::vector<double>& fallback) {
  if (!cfg.has("prior", key)) return fallback;
  std::string raw = cfg.get_string("prior", key, "");
  std::replace(raw.begin(), raw.end(), ',', ' ');
  std::istringstream in(raw);
  std::string tok;
  std::vector<double> out;
  bool first = true;
  while (in >> tok) {
    if (first && std::isalpha(static_cast<unsigned char>(tok[0]))) {
      if (tok != family) {
        throw std::runtime_error("prior." + key + ": expected distribution '" + family + "', got '" + tok + "'");
      }
      first = false;
      continue;
    }
    first = false;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("prior." + key + ": not a number: '" + tok + "'");
    }
  }
  if (out.size() != 2 || !(out[1] > 0.0)) {
    throw std::runtime_error("prior." + key + ": expected two parameters with the second > 0");
  }
  return out;
}

NormalSpec normal_from(const ConfigFile& cfg, const std::string& key, const NormalSpec& fallback) {
  const auto list = dist_params(cfg, key, "normal", {fallback.mean, fallback.stddev});
  return {list[0], list[1]};
}

MapSpec map_from_config(const ConfigFile& cfg) {
  MapSpec spec;
  spec.path = cfg.get_string("map", "path", "");
  spec.rows = cfg.get_int("map", "rows", spec.rows);
  spec.cols = cfg.get_int("map", "cols", spec.cols);
  spec.cell_size = cfg.get_double("map", "cell_size", spec.cell_size);
  spec.origin_x = cfg.get_double("map", "origin_x", spec.origin_x);
  spec.origin_y = cfg.get_double("map", "origin_y", spec.origin_y);
  spec.blocks = cfg.get_int("map", "blocks", spec.blocks);
  spec.block_min = cfg.get_double("map", "block_min", spec.block_min);
  spec.block_max = cfg.get_double("map", "block_max", spec.block_max);
  spec.map_seed = cfg.get_u64("map", "map_seed", spec.map_seed);
  if (cfg.has("map", "walls")) {
    const auto vals = cfg.get_double_list("map", "walls", {});
    if (vals.size() % 4 != 0) throw std::runtime_error("map.walls: expected groups of 'x0 y0 x1 y1'");
    for (std::size_t i = 0; i + 3 < vals.size(); i += 4) {
      spec.walls.push_back({vals[i], vals[i + 1], vals[i + 2], vals[i + 3]});
    }
  }
  if (cfg.has("map", "keep_free")) {
    const auto vals = cfg.get_double_list("map", "keep_free", {});
    if (vals.size() % 3 != 0) throw std::runtime_error("map.keep_free: expected groups of 'x y radius'");
    for (std::size_t i = 0; i + 2 < vals.size(); i += 3) {
      spec.keep_free.push_back({vals[i], vals[i + 1], vals[i + 2]});
    }
  }
  return spec;
}

SourceTerm source_from_section(const ConfigFile& cfg, const std::string& section, const SourceTerm& fallback) {
  SourceTerm t = fallback;
  t.s_x = cfg.get_double(section, "x", t.s_x);
  t.s_y = cfg.get_double(section, "y", t.s_y);
  t.s_z = cfg.get_double(section, "z", t.s_z);
  t.q = cfg.get_double(section, "q_gps", t.q);
  t.u = cfg.get_double(section, "u", t.u);
  t.phi = wrap_degrees_360(cfg.get_double(section, "phi_deg", t.phi));
  t.d = cfg.get_double(section, "d", t.d);
  t.tau = cfg.get_double(section, "tau", t.tau);
  if (!(t.q > 0.0) || !(t.d > 0.0) || !(t.tau > 0.0) || t.u < 0.0) {
    throw std::runtime_error(section + ": q, d, tau must be > 0 and u >= 0");
  }
  return t;
}

}  // namespace

ScenarioConfig scenario_from_config(const ConfigFile& cfg) {
  ScenarioConfig sc;
  sc.name = cfg.get_string("scenario", "name", sc.name);
  sc.planner = planner_from_string(cfg.get_string("scenario", "planner", to_string(sc.planner)));
  sc.budget_s = cfg.get_double("scenario", "budget_s", sc.budget_s);
  sc.success_radius = cfg.get_double("scenario", "success_radius_m", sc.success_radius);
  sc.seed = cfg.get_u64("scenario", "seed", sc.seed);

  sc.map = map_from_config(cfg);
  sc.truth = source_from_section(cfg, "source", sc.truth);

  sc.mode = plume_mode_from_string(cfg.get_string("plume", "mode", to_string(sc.mode)));
  sc.noise_sigma = cfg.get_double("plume", "noise_sigma", sc.noise_sigma);
  sc.replay_index = cfg.get_string("plume", "replay_index", sc.replay_index);
  sc.sensor_threshold = cfg.get_double("sensor", "threshold", sc.sensor_threshold);

  sc.start.x = cfg.get_double("robot", "start_x", sc.start.x);
  sc.start.y = cfg.get_double("robot", "start_y", sc.start.y);
  sc.velocity = cfg.get_double("robot", "velocity", sc.velocity);
  sc.dwell_s = cfg.get_double("robot", "dwell_s", sc.dwell_s);
  if (!(sc.velocity > 0.0)) throw std::runtime_error("robot.velocity must be > 0");
  if (!(sc.budget_s >= 0.0)) throw std::runtime_error("scenario.budget_s must be >= 0");

  sc.prior.x_s = normal_from(cfg, "x_s", sc.prior.x_s);
  sc.prior.y_s = normal_from(cfg, "y_s", sc.prior.y_s);
  sc.prior.z_s = normal_from(cfg, "z_s", sc.prior.z_s);
  {
    const auto q = dist_params(cfg, "q", "gamma", {sc.prior.q_shape, sc.prior.q_scale});
    if (!(q[0] > 0.0)) throw std::runtime_error("prior.q: shape must be > 0");
    sc.prior.q_shape = q[0];
    sc.prior.q_scale = q[1];
  }
  sc.prior.u = normal_from(cfg, "u", sc.prior.u);
  sc.prior.phi = normal_from(cfg, "phi", sc.prior.phi);
  sc.prior.d = normal_from(cfg, "d", sc.prior.d);
  sc.prior.tau = normal_from(cfg, "tau", sc.prior.tau);

  sc.pf.n = cfg.get_int("pf", "n", sc.pf.n);
  sc.pf.eta = cfg.get_double("pf", "eta", sc.pf.eta);
  sc.pf.jitter_scale = cfg.get_double("pf", "jitter_scale", sc.pf.jitter_scale);
  sc.lik_sigma = cfg.get_double("inference", "lik_sigma", sc.lik_sigma);

  sc.tree.n_samples = cfg.get_int("planner", "n_samples", sc.tree.n_samples);
  sc.tree.k_n = cfg.get_int("planner", "k_n", sc.tree.k_n);
  sc.tree.sigma_count = cfg.get_int("planner", "sigma_count", sc.tree.sigma_count);
  sc.tree.kappa = cfg.get_double("planner", "kappa", sc.tree.kappa);
  sc.tree.c_bar = cfg.get_double("planner", "c_bar", sc.tree.c_bar);
  sc.tree.blossom_retry_factor = cfg.get_int("planner", "blossom_retry_factor", sc.tree.blossom_retry_factor);
  sc.tree.resample_batch = cfg.get_bool("planner", "resample_batch", sc.tree.resample_batch);
  sc.n_z = cfg.get_int("planner", "n_z", sc.n_z);
  if (sc.tree.n_samples < sc.tree.sigma_count || sc.tree.sigma_count < 1) {
    throw std::runtime_error("planner: need n_samples >= sigma_count >= 1");
  }

  sc.baseline.directions_deg =
      cfg.get_double_list("baseline", "directions", sc.baseline.directions_deg);
  sc.baseline.step_sizes = cfg.get_double_list("baseline", "step_sizes", sc.baseline.step_sizes);
  sc.baseline.n_jump = cfg.get_int("baseline", "n_jump", sc.baseline.n_jump);
  sc.baseline.m_jump = cfg.get_int("baseline", "m_jump", sc.baseline.m_jump);

  sc.rebuild_deg = cfg.get_double("sampler", "rebuild_deg", sc.rebuild_deg);
  sc.noiseless_prediction = cfg.get_bool("utility", "noiseless_prediction", sc.noiseless_prediction);
  sc.lattice_s = cfg.get_double("metrics", "lattice_s", sc.lattice_s);
  return sc;
}

SweepSpec sweep_from_config(const ConfigFile& cfg) {
  SweepSpec spec;
  spec.base = scenario_from_config(cfg);

  std::istringstream planners(cfg.get_string("sweep", "planners", "entrotaxis jump uniform_tree informed_tree"));
  std::string tok;
  while (planners >> tok) spec.planners.push_back(planner_from_string(tok));

  const auto source_sections = cfg.sections_with_prefix("source.");
  if (source_sections.empty()) {
    spec.sources.emplace_back("s1", spec.base.truth);
  } else {
    for (const std::string& section : source_sections) {
      spec.sources.emplace_back(section.substr(7), source_from_section(cfg, section, spec.base.truth));
    }
  }

  const auto starts = cfg.get_double_list("sweep", "starts", {spec.base.start.x, spec.base.start.y});
  if (starts.size() % 2 != 0) throw std::runtime_error("sweep.starts: expected pairs of 'x y'");
  for (std::size_t i = 0; i + 1 < starts.size(); i += 2) spec.starts.push_back({starts[i], starts[i + 1]});

  spec.repeats = cfg.get_int("sweep", "repeats", spec.repeats);
  spec.master_seed = cfg.get_u64("sweep", "master_seed", spec.master_seed);
  spec.workers = cfg.get_int("sweep", "workers", spec.workers);
  if (spec.repeats < 1) throw std::runtime_error("sweep.repeats must be >= 1");
  return spec;
}

}  // namespace plumesearch
