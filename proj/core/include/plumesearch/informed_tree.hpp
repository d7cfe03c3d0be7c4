#pragma once

#include <limits>
#include <vector>

#include "plumesearch/grid_map.hpp"
#include "plumesearch/rng.hpp"
#include "plumesearch/wind_sampler.hpp"

namespace plumesearch {

struct PlannerConfig {
  int n_samples = 4000;   // batch size N
  int k_n = 5;            // goal-set neighbours
  int sigma_count = 16;   // |Sigma|, candidate paths per step
  double kappa = 1.1;     // RGG radius scaling
  int dimension = 2;
  double c_bar = std::numeric_limits<double>::infinity();  // optional path length cap
  int blossom_retry_factor = 50;  // retry budget = factor * sigma_count draws
  bool resample_batch = true;     // fresh G every planning step
};

// Rooted geometric tree with cost-to-come bookkeeping. Index 0 is the root;
// parent[0] = -1. Every edge satisfies segment_free and
// cost[v] = cost[parent[v]] + |edge|.
struct Tree {
  WorldPoint root;
  std::vector<WorldPoint> points;  // [0] = root
  std::vector<int> parent;
  std::vector<double> cost;        // g_tau
  std::vector<WorldPoint> goal_set;
  WorldPoint goal_estimate;
  double c_best = std::numeric_limits<double>::infinity();
  int blossom_shortfall = 0;  // vertices still missing after the retry budget

  int size() const { return static_cast<int>(points.size()); }
  int non_root_count() const { return size() - 1; }

  double g_hat(const WorldPoint& p) const { return distance(root, p); }
  double h_hat(const WorldPoint& p) const;  // distance to the goal set
  double f_hat(const WorldPoint& p) const { return g_hat(p) + h_hat(p); }
};

// One candidate trajectory, root first. length equals the terminal vertex's
// cost-to-come.
struct CandidatePath {
  std::vector<WorldPoint> waypoints;
  double length = 0.0;

  const WorldPoint& terminal() const { return waypoints.back(); }
};

// RGG connection radius r = 2k (1+1/n)^(1/n) (measure/zeta_n)^(1/n)
// (log m / m)^(1/n).
double rgg_radius(double sample_count, double measure, double kappa, int dimension);

// Single-batch expansion of the tree from the root towards the goal set (the
// k_n samples nearest the goal estimate), processing vertices in ascending
// f_hat order and edges by the improvement test. Stops when a goal-set
// member joins the tree or the vertex queue empties.
Tree expand_tree(const std::vector<WorldPoint>& samples, const WorldPoint& root, const WorldPoint& goal_estimate,
                 const OccupancyGrid& grid, const PlannerConfig& config);

// Drops every vertex with f_hat > c_best (and its descendants). No-op while
// no solution exists.
void prune(Tree& tree, double c_best);

// Grows the pruned tree back to sigma_count non-root vertices with fresh
// weighted samples constrained to f_hat <= c_best + 2*sigma_loc. Draws that
// fail to connect leave the tree unchanged; a bounded retry budget guards
// against mostly-occupied ellipses (remaining deficit is recorded in
// blossom_shortfall).
void blossom(Tree& tree, const SampleDistribution& dist, double sigma_loc, const PlannerConfig& config,
             const OccupancyGrid& grid, Rng& rng);

// Keeps the root plus the sigma_count non-root vertices of lowest
// cost-to-come; a vertex is only kept if its parent survives.
void cull(Tree& tree, const PlannerConfig& config);

// One path per non-root vertex, filtered by c_bar.
std::vector<CandidatePath> extract_paths(const Tree& tree, const PlannerConfig& config);

// expand + prune + blossom/cull in one call; the planner's per-step pipeline.
Tree build_candidate_tree(const std::vector<WorldPoint>& samples, const WorldPoint& root,
                          const WorldPoint& goal_estimate, double sigma_loc, const OccupancyGrid& grid,
                          const SampleDistribution& dist, const PlannerConfig& config, Rng& rng);

}  // namespace plumesearch
