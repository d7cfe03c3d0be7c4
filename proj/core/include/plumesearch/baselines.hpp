#pragma once

#include <deque>
#include <span>
#include <vector>

#include "plumesearch/search_utility.hpp"

namespace plumesearch {

// Myopic action set shared by Entrotaxis and Entrotaxis-Jump: every heading
// at every step size is one candidate endpoint.
struct BaselineConfig {
  std::vector<double> directions_deg = {0, 45, 90, 135, 180, 225, 270, 315};
  std::vector<double> step_sizes = {10.0, 20.0};
  int n_jump = 4;   // blocked events that trigger a jump
  int m_jump = 10;  // move-window length of the blocked-event memory

  int candidate_count() const { return static_cast<int>(directions_deg.size() * step_sizes.size()); }
};

// Per-direction blocked-event history over the last m_jump moves.
struct JumpState {
  std::deque<std::vector<int>> history;  // one entry per move, counts per direction

  int window_count(int direction) const;
  void push(std::vector<int> events, int m_jump);
  void reset_direction(int direction);
};

struct BaselineStep {
  std::vector<WorldPoint> waypoints;  // single endpoint, or a jump route
  bool stalled = false;               // all candidates blocked; stays at x_k
  bool jumped = false;
  int candidates_evaluated = 0;
  double chosen_utility = 0.0;
};

// One Entrotaxis move: evaluates the feasible candidates (straight segment
// from x_k collision-free) and returns the argmin-utility endpoint. All
// blocked: the robot re-samples where it stands.
BaselineStep entrotaxis_step(const ParticleSet& ps, const WorldPoint& x_k, const OccupancyGrid& grid, int n_z,
                             const LikelihoodModel& model, bool noiseless, const BaselineConfig& config, Rng& rng);

// One Entrotaxis-Jump move: evaluates all candidates including blocked ones.
// A blocked direction that keeps winning the utility accumulates events;
// once it has n_jump of them within the last m_jump moves the robot commits
// to a grid shortest path around the obstacle to that endpoint.
BaselineStep jump_step(const ParticleSet& ps, const WorldPoint& x_k, const OccupancyGrid& grid, JumpState& state,
                       int n_z, const LikelihoodModel& model, bool noiseless, const BaselineConfig& config, Rng& rng);

// Skill score over tuning configurations: normalised success rate and mean
// search time combined with weights w_sr, w_mst. A component whose values
// are all equal scores 1 for every configuration.
std::vector<double> skill_score(std::span<const double> sr, std::span<const double> mst, double w_sr, double w_mst);

}  // namespace plumesearch
