#include "plumesearch/wind_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace plumesearch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double SampleDistribution::weight_at(int row, int col) const {
  const int id = row * cols + col;
  for (std::size_t k = 0; k < free_cells.size(); ++k) {
    if (free_cells[k] == id) return weights[k];
  }
  return 0.0;
}

std::vector<CellIndex> inlet_states(const OccupancyGrid& grid, double phi_deg) {
  const WorldPoint flow = wind_flow_unit(phi_deg);
  // Outward normals for the west, east, south, north edges.
  const WorldPoint normals[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  int best = 0;
  double best_dot = dot(normals[0], flow);
  for (int i = 1; i < 4; ++i) {
    const double d = dot(normals[i], flow);
    if (d < best_dot) {
      best_dot = d;
      best = i;
    }
  }
  std::vector<CellIndex> inlet;
  switch (best) {
    case 0:
      for (int r = 0; r < grid.rows; ++r) inlet.push_back({r, 0});
      break;
    case 1:
      for (int r = 0; r < grid.rows; ++r) inlet.push_back({r, grid.cols - 1});
      break;
    case 2:
      for (int c = 0; c < grid.cols; ++c) inlet.push_back({0, c});
      break;
    default:
      for (int c = 0; c < grid.cols; ++c) inlet.push_back({grid.rows - 1, c});
      break;
  }
  return inlet;
}

CostField dijkstra_cost(const OccupancyGrid& grid, const std::vector<CellIndex>& sources, bool respect_obstacles) {
  if (sources.empty()) throw std::invalid_argument("dijkstra_cost: empty source set");

  CostField field;
  field.rows = grid.rows;
  field.cols = grid.cols;
  field.cost.assign(static_cast<std::size_t>(grid.rows) * grid.cols, kInf);

  const auto blocked = [&](int r, int c) { return respect_obstacles && grid.occupied(r, c); };

  using Item = std::pair<double, int>;  // (cost, cell id)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

  for (const CellIndex& s : sources) {
    if (!grid.cell_in_grid(s.row, s.col)) throw std::invalid_argument("dijkstra_cost: source outside grid");
    if (blocked(s.row, s.col)) continue;
    const int id = s.row * grid.cols + s.col;
    if (field.cost[id] > 0.0) {
      field.cost[id] = 0.0;
      queue.emplace(0.0, id);
    }
  }

  const double axis = grid.cell_size;
  const double diag = std::sqrt(2.0) * grid.cell_size;
  static constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

  while (!queue.empty()) {
    const auto [cost, id] = queue.top();
    queue.pop();
    if (cost > field.cost[id]) continue;  // stale entry
    const int r = id / grid.cols, c = id % grid.cols;
    for (int k = 0; k < 8; ++k) {
      const int nr = r + kDr[k], nc = c + kDc[k];
      if (!grid.cell_in_grid(nr, nc) || blocked(nr, nc)) continue;
      const bool diagonal = kDr[k] != 0 && kDc[k] != 0;
      // No cutting corners past obstacles on diagonal moves.
      if (diagonal && (blocked(r, nc) || blocked(nr, c))) continue;
      const double next = cost + (diagonal ? diag : axis);
      const int nid = nr * grid.cols + nc;
      if (next < field.cost[nid]) {
        field.cost[nid] = next;
        queue.emplace(next, nid);
      }
    }
  }
  return field;
}

namespace {

SampleDistribution finalize_distribution(const OccupancyGrid& grid, double phi_deg, const std::vector<double>& raw) {
  SampleDistribution dist;
  dist.rows = grid.rows;
  dist.cols = grid.cols;
  dist.phi_deg = phi_deg;
  double total = 0.0;
  for (int id = 0; id < grid.rows * grid.cols; ++id) {
    if (grid.cells[id] != 0) continue;
    dist.free_cells.push_back(id);
    dist.weights.push_back(raw[id]);
    total += raw[id];
  }
  if (dist.free_cells.empty()) throw std::runtime_error("sample distribution: map has no free cells");
  dist.cumulative.resize(dist.weights.size());
  double run = 0.0;
  for (std::size_t k = 0; k < dist.weights.size(); ++k) {
    dist.weights[k] /= total;
    run += dist.weights[k];
    dist.cumulative[k] = run;
  }
  dist.cumulative.back() = 1.0;
  return dist;
}

}  // namespace

SampleDistribution build_distribution(const OccupancyGrid& grid, double phi_deg) {
  const std::vector<CellIndex> inlet = inlet_states(grid, phi_deg);
  const CostField c_obs = dijkstra_cost(grid, inlet, true);
  const CostField c_open = dijkstra_cost(grid, inlet, false);

  const int n = grid.rows * grid.cols;
  // C_phi <= 0 on free cells reachable from the inlet; more negative in wakes.
  std::vector<double> c_phi(static_cast<std::size_t>(n), kInf);
  double lo = kInf, hi = -kInf;
  for (int id = 0; id < n; ++id) {
    if (grid.cells[id] != 0) continue;
    if (!std::isfinite(c_obs.cost[id])) continue;  // walled off from the inlet
    const double v = c_open.cost[id] - c_obs.cost[id];
    c_phi[id] = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  std::vector<double> raw(static_cast<std::size_t>(n), 0.0);
  if (!std::isfinite(lo)) {
    // Nothing reachable from the inlet: fall back to a uniform density.
    for (int id = 0; id < n; ++id) raw[id] = grid.cells[id] == 0 ? 1.0 : 0.0;
    return finalize_distribution(grid, phi_deg, raw);
  }

  const double range = hi - lo;
  const double eps = range > 0.0 ? 0.05 * range : 1.0;
  for (int id = 0; id < n; ++id) {
    if (grid.cells[id] != 0) continue;
    raw[id] = std::isfinite(c_phi[id]) ? c_phi[id] - lo + eps : eps;
  }
  return finalize_distribution(grid, phi_deg, raw);
}

SampleDistribution build_uniform_distribution(const OccupancyGrid& grid) {
  std::vector<double> raw(static_cast<std::size_t>(grid.rows) * grid.cols, 0.0);
  for (int id = 0; id < grid.rows * grid.cols; ++id) raw[id] = grid.cells[id] == 0 ? 1.0 : 0.0;
  return finalize_distribution(grid, 0.0, raw);
}

std::vector<CellIndex> grid_shortest_path(const OccupancyGrid& grid, CellIndex from, CellIndex to) {
  if (!grid.cell_in_grid(from.row, from.col) || !grid.cell_in_grid(to.row, to.col)) return {};
  if (grid.occupied(from.row, from.col) || grid.occupied(to.row, to.col)) return {};
  if (from == to) return {from};

  const int n = grid.rows * grid.cols;
  std::vector<double> cost(static_cast<std::size_t>(n), kInf);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

  const int start = from.row * grid.cols + from.col;
  const int target = to.row * grid.cols + to.col;
  cost[start] = 0.0;
  queue.emplace(0.0, start);

  const double axis = grid.cell_size;
  const double diag = std::sqrt(2.0) * grid.cell_size;
  static constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

  while (!queue.empty()) {
    const auto [c0, id] = queue.top();
    queue.pop();
    if (c0 > cost[id]) continue;
    if (id == target) break;
    const int r = id / grid.cols, c = id % grid.cols;
    for (int k = 0; k < 8; ++k) {
      const int nr = r + kDr[k], nc = c + kDc[k];
      if (!grid.cell_in_grid(nr, nc) || grid.occupied(nr, nc)) continue;
      const bool diagonal = kDr[k] != 0 && kDc[k] != 0;
      if (diagonal && (grid.occupied(r, nc) || grid.occupied(nr, c))) continue;
      const double next = c0 + (diagonal ? diag : axis);
      const int nid = nr * grid.cols + nc;
      if (next < cost[nid]) {
        cost[nid] = next;
        parent[nid] = id;
        queue.emplace(next, nid);
      }
    }
  }

  if (!std::isfinite(cost[target])) return {};
  std::vector<CellIndex> path;
  for (int id = target; id >= 0; id = parent[id]) path.push_back({id / grid.cols, id % grid.cols});
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<WorldPoint> draw_samples(const SampleDistribution& dist, const OccupancyGrid& grid, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("draw_samples: n must be >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<WorldPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = unit(rng);
    const auto it = std::upper_bound(dist.cumulative.begin(), dist.cumulative.end(), u);
    const std::size_t k = std::min<std::size_t>(it - dist.cumulative.begin(), dist.cumulative.size() - 1);
    const int id = dist.free_cells[k];
    const int row = id / dist.cols, col = id % dist.cols;
    WorldPoint p{grid.origin_x + (col + unit(rng)) * grid.cell_size,
                 grid.origin_y + (row + unit(rng)) * grid.cell_size};
    if (!is_free(grid, p)) p = grid.cell_center(row, col);  // rounding landed on a boundary
    out.push_back(p);
  }
  return out;
}

}  // namespace plumesearch
