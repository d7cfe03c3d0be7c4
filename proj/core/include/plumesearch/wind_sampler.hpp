#pragma once

#include <vector>

#include "plumesearch/grid_map.hpp"
#include "plumesearch/rng.hpp"

namespace plumesearch {

// Per-cell traversal cost from a source set; +inf where unreachable.
struct CostField {
  int rows = 0;
  int cols = 0;
  std::vector<double> cost;

  double at(int row, int col) const { return cost[static_cast<std::size_t>(row) * cols + col]; }
  double& at(int row, int col) { return cost[static_cast<std::size_t>(row) * cols + col]; }
};

// Categorical weights over free cells; the planner's sampling density.
struct SampleDistribution {
  int rows = 0;
  int cols = 0;
  double phi_deg = 0.0;             // wind direction the field was built for
  std::vector<int> free_cells;      // row-major indices of X_free
  std::vector<double> weights;      // per free cell, sums to 1
  std::vector<double> cumulative;   // running sum of weights, same length

  double weight_at(int row, int col) const;
};

// Boundary cells of the edge facing the incoming wind; phi = 270 (wind from
// the west) selects the col = 0 edge. Ties at exact 45-degree multiples snap
// in the fixed order west, east, south, north.
std::vector<CellIndex> inlet_states(const OccupancyGrid& grid, double phi_deg);

// Multi-source shortest path over 8-connected cells; axis moves cost
// cell_size, diagonal moves sqrt(2)*cell_size. With respect_obstacles the
// graph is restricted to free cells and diagonals may not cut corners.
CostField dijkstra_cost(const OccupancyGrid& grid, const std::vector<CellIndex>& sources, bool respect_obstacles);

// Wind-aware sampling density: C_phi = C_open - C_obs, shifted positive with
// an epsilon floor and normalised. Building wakes get low weight; cells
// walled off from the inlet get the floor weight.
SampleDistribution build_distribution(const OccupancyGrid& grid, double phi_deg);

// Uniform density over free cells (the uniform tree-search ablation).
SampleDistribution build_uniform_distribution(const OccupancyGrid& grid);

// Categorical draw over free cells by weight, uniformly jittered inside the
// chosen cell. Every returned point satisfies is_free.
std::vector<WorldPoint> draw_samples(const SampleDistribution& dist, const OccupancyGrid& grid, int n, Rng& rng);

// Cell sequence of a shortest obstacle-respecting path on the same
// 8-connected graph, endpoints inclusive; empty when unreachable.
std::vector<CellIndex> grid_shortest_path(const OccupancyGrid& grid, CellIndex from, CellIndex to);

}  // namespace plumesearch
