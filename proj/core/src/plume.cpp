#include "plumesearch/plume.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace plumesearch {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double plume_lambda(double d, double tau, double u) {
  if (!(d > 0.0) || !(tau > 0.0)) throw std::domain_error("plume_lambda: d and tau must be > 0");
  if (u < 0.0) throw std::domain_error("plume_lambda: u must be >= 0");
  return std::sqrt(d * tau / (1.0 + u * u * tau / (4.0 * d)));
}

double log_expected_concentration(const WorldPoint& p, const SourceTerm& theta, double rho_min) {
  const WorldPoint rel{p.x - theta.s_x, p.y - theta.s_y};
  const double rho = norm(rel);
  const double rho_c = std::max(rho, rho_min);
  const double dw = dot(rel, wind_flow_unit(theta.phi));
  const double lambda = plume_lambda(theta.d, theta.tau, theta.u);
  return std::log(theta.q / (4.0 * kPi * theta.d * rho_c)) - rho_c / lambda + theta.u * dw / (2.0 * theta.d);
}

double expected_concentration(const WorldPoint& p, const SourceTerm& theta, double rho_min) {
  return std::exp(log_expected_concentration(p, theta, rho_min));
}

PlumeMode plume_mode_from_string(const std::string& s) {
  if (s == "analytic") return PlumeMode::analytic;
  if (s == "geodesic") return PlumeMode::geodesic;
  if (s == "replay") return PlumeMode::replay;
  throw std::runtime_error("unknown plume mode: " + s);
}

std::string to_string(PlumeMode mode) {
  switch (mode) {
    case PlumeMode::analytic: return "analytic";
    case PlumeMode::geodesic: return "geodesic";
    default: return "replay";
  }
}

GroundTruthField GroundTruthField::make(PlumeMode mode, const SourceTerm& source, double noise_sigma,
                                        const OccupancyGrid& grid, std::vector<ReplayFrame> frames) {
  GroundTruthField f;
  f.mode_ = mode;
  f.source_ = source;
  f.noise_sigma_ = noise_sigma;
  f.rho_min_ = grid.cell_size / 2.0;

  if (mode == PlumeMode::geodesic) {
    const auto source_cell = grid.world_to_cell({source.s_x, source.s_y});
    if (!source_cell) throw std::runtime_error("geodesic plume: source is outside the map");
    if (grid.occupied(source_cell->row, source_cell->col))
      throw std::runtime_error("geodesic plume: source cell is occupied");
    f.source_dist_ = dijkstra_cost(grid, {*source_cell}, true);
    f.inlet_cost_ = dijkstra_cost(grid, inlet_states(grid, source.phi), true);
    f.inlet_cost_at_source_ = f.inlet_cost_.at(source_cell->row, source_cell->col);
  } else if (mode == PlumeMode::replay) {
    if (frames.empty()) throw std::runtime_error("replay plume: no frames configured");
    for (const ReplayFrame& fr : frames) {
      if (static_cast<int>(fr.values.size()) != grid.rows * grid.cols)
        throw std::runtime_error("replay plume: frame size does not match the grid");
    }
    std::sort(frames.begin(), frames.end(),
              [](const ReplayFrame& a, const ReplayFrame& b) { return a.time_s < b.time_s; });
    f.frames_ = std::move(frames);
  }
  return f;
}

double GroundTruthField::concentration(const OccupancyGrid& grid, const WorldPoint& p, Rng& rng,
                                       double time_s) const {
  const auto cell = grid.world_to_cell(p);
  if (!cell || grid.occupied(cell->row, cell->col)) return 0.0;

  double mean = 0.0;
  switch (mode_) {
    case PlumeMode::analytic:
      mean = expected_concentration(p, source_, rho_min_);
      break;
    case PlumeMode::geodesic: {
      const double rho_geo = source_dist_.at(cell->row, cell->col);
      if (!std::isfinite(rho_geo)) return 0.0;  // walled off from the source
      const double inlet_cost = inlet_cost_.at(cell->row, cell->col);
      if (!std::isfinite(inlet_cost) || !std::isfinite(inlet_cost_at_source_)) return 0.0;
      // Downwind displacement measured along the wind cost field; bounded by
      // rho_geo through the triangle inequality, so the model's concentration
      // bound carries over.
      const double dw = inlet_cost - inlet_cost_at_source_;
      const double rho_c = std::max(rho_geo, rho_min_);
      const double lambda = plume_lambda(source_.d, source_.tau, source_.u);
      mean = source_.q / (4.0 * kPi * source_.d * rho_c) *
             std::exp(-rho_c / lambda + source_.u * dw / (2.0 * source_.d));
      break;
    }
    case PlumeMode::replay: {
      // Piecewise-constant in time: latest frame with time <= time_s.
      std::size_t fi = 0;
      for (std::size_t k = 0; k < frames_.size(); ++k) {
        if (frames_[k].time_s <= time_s) fi = k;
      }
      const ReplayFrame& frame = frames_[fi];
      // Bilinear interpolation over cell centres, clamped at the border.
      const double gx = std::clamp((p.x - grid.origin_x) / grid.cell_size - 0.5, 0.0, grid.cols - 1.0);
      const double gy = std::clamp((p.y - grid.origin_y) / grid.cell_size - 0.5, 0.0, grid.rows - 1.0);
      const int c0 = std::min(static_cast<int>(gx), grid.cols - 2 >= 0 ? grid.cols - 2 : 0);
      const int r0 = std::min(static_cast<int>(gy), grid.rows - 2 >= 0 ? grid.rows - 2 : 0);
      const int c1 = std::min(c0 + 1, grid.cols - 1);
      const int r1 = std::min(r0 + 1, grid.rows - 1);
      const double fx = gx - c0, fy = gy - r0;
      const auto v = [&](int r, int c) { return frame.values[static_cast<std::size_t>(r) * grid.cols + c]; };
      mean = (1 - fy) * ((1 - fx) * v(r0, c0) + fx * v(r0, c1)) + fy * ((1 - fx) * v(r1, c0) + fx * v(r1, c1));
      return std::max(mean, 0.0);
    }
  }

  if (noise_sigma_ > 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    mean *= std::exp(noise_sigma_ * gauss(rng));
  }
  return mean;
}

double true_concentration(const GroundTruthField& field, const OccupancyGrid& grid, const WorldPoint& p, Rng& rng,
                          double time_s) {
  return field.concentration(grid, p, rng, time_s);
}

Measurement sample_measurement(const GroundTruthField& field, const OccupancyGrid& grid, const WorldPoint& p,
                               double sensor_threshold, Rng& rng, double time_s, int step_index) {
  if (!is_free(grid, p)) throw std::invalid_argument("sample_measurement: position is not in free space");
  const double value = field.concentration(grid, p, rng, time_s);
  Measurement m;
  m.position = p;
  m.step_index = step_index;
  m.detected = value >= sensor_threshold;
  m.value = m.detected ? value : 0.0;
  return m;
}

std::vector<ReplayFrame> load_replay_frames(const std::string& index_path, const OccupancyGrid& grid) {
  std::ifstream in(index_path);
  if (!in) throw std::runtime_error("cannot open replay index: " + index_path);
  const std::filesystem::path base = std::filesystem::path(index_path).parent_path();

  std::vector<ReplayFrame> frames;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ReplayFrame frame;
    std::string rel;
    if (!(ls >> frame.time_s >> rel))
      throw std::runtime_error(index_path + ":" + std::to_string(line_no) + ": expected '<time_s> <csv_path>'");

    const std::filesystem::path frame_path = base / rel;
    std::ifstream fin(frame_path);
    if (!fin) throw std::runtime_error("cannot open replay frame: " + frame_path.string());
    frame.values.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
    std::string row;
    int frow = 0;
    while (std::getline(fin, row)) {
      ++frow;
      if (row.empty()) continue;
      std::istringstream rs(row);
      std::string tok;
      while (std::getline(rs, tok, ',')) frame.values.push_back(std::stod(tok));
    }
    if (static_cast<int>(frame.values.size()) != grid.rows * grid.cols)
      throw std::runtime_error(frame_path.string() + ": expected " + std::to_string(grid.rows * grid.cols) +
                               " values, got " + std::to_string(frame.values.size()));
    frames.push_back(std::move(frame));
  }
  if (frames.empty()) throw std::runtime_error(index_path + ": no frames listed");
  return frames;
}

}  // namespace plumesearch
