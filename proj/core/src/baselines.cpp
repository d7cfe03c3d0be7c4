#include "plumesearch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plumesearch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int JumpState::window_count(int direction) const {
  int count = 0;
  for (const std::vector<int>& move : history) count += move[static_cast<std::size_t>(direction)];
  return count;
}

void JumpState::push(std::vector<int> events, int m_jump) {
  history.push_back(std::move(events));
  while (static_cast<int>(history.size()) > m_jump) history.pop_front();
}

void JumpState::reset_direction(int direction) {
  for (std::vector<int>& move : history) move[static_cast<std::size_t>(direction)] = 0;
}

namespace {

struct CandidateGrid {
  std::vector<WorldPoint> endpoints;
  std::vector<double> lengths;
  std::vector<int> direction;  // direction index per candidate
  std::vector<char> feasible;
};

CandidateGrid make_candidates(const WorldPoint& x_k, const OccupancyGrid& grid, const BaselineConfig& config) {
  CandidateGrid cg;
  for (std::size_t d = 0; d < config.directions_deg.size(); ++d) {
    const double rad = config.directions_deg[d] * kDegToRad;
    const WorldPoint dir{std::cos(rad), std::sin(rad)};
    for (double step : config.step_sizes) {
      const WorldPoint end = x_k + step * dir;
      cg.endpoints.push_back(end);
      cg.lengths.push_back(step);
      cg.direction.push_back(static_cast<int>(d));
      cg.feasible.push_back(segment_free(grid, x_k, end) ? 1 : 0);
    }
  }
  return cg;
}

// Best candidate under the select_candidate convention (largest expected
// entropy reduction, same tie-breaks), restricted to the flagged candidates.
int masked_best(const CandidateGrid& cg, std::span<const double> psi, std::span<const char> mask) {
  int best = -1;
  for (std::size_t k = 0; k < cg.endpoints.size(); ++k) {
    if (!mask[k]) continue;
    if (best < 0) {
      best = static_cast<int>(k);
      continue;
    }
    const std::size_t b = static_cast<std::size_t>(best);
    const bool better = psi[k] > psi[b] ||
                        (psi[k] == psi[b] &&
                         (cg.lengths[k] < cg.lengths[b] ||
                          (cg.lengths[k] == cg.lengths[b] &&
                           (cg.endpoints[k].x < cg.endpoints[b].x ||
                            (cg.endpoints[k].x == cg.endpoints[b].x && cg.endpoints[k].y < cg.endpoints[b].y)))));
    if (better) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

BaselineStep entrotaxis_step(const ParticleSet& ps, const WorldPoint& x_k, const OccupancyGrid& grid, int n_z,
                             const LikelihoodModel& model, bool noiseless, const BaselineConfig& config, Rng& rng) {
  const CandidateGrid cg = make_candidates(x_k, grid, config);

  std::vector<WorldPoint> endpoints;
  std::vector<double> lengths;
  for (std::size_t k = 0; k < cg.endpoints.size(); ++k) {
    if (!cg.feasible[k]) continue;
    endpoints.push_back(cg.endpoints[k]);
    lengths.push_back(cg.lengths[k]);
  }

  BaselineStep step;
  step.candidates_evaluated = static_cast<int>(endpoints.size());
  if (endpoints.empty()) {
    step.stalled = true;
    step.waypoints = {x_k};
    return step;
  }
  std::vector<double> psi;
  const int best = select_candidate(endpoints, lengths, ps, n_z, model, noiseless, rng, &psi);
  step.waypoints = {endpoints[static_cast<std::size_t>(best)]};
  step.chosen_utility = psi[static_cast<std::size_t>(best)];
  return step;
}

BaselineStep jump_step(const ParticleSet& ps, const WorldPoint& x_k, const OccupancyGrid& grid, JumpState& state,
                       int n_z, const LikelihoodModel& model, bool noiseless, const BaselineConfig& config, Rng& rng) {
  const CandidateGrid cg = make_candidates(x_k, grid, config);
  const std::size_t n_cand = cg.endpoints.size();
  const std::size_t n_dir = config.directions_deg.size();

  BaselineStep step;
  step.candidates_evaluated = static_cast<int>(n_cand);

  bool any_feasible = false;
  for (char f : cg.feasible) any_feasible |= f != 0;
  if (!any_feasible) {
    step.stalled = true;
    step.waypoints = {x_k};
    state.push(std::vector<int>(n_dir, 0), config.m_jump);
    return step;
  }

  // All candidates, blocked ones included, get their utility evaluated.
  const PredictiveDraws draws = make_predictive_draws(ps, n_z, noiseless, rng);
  std::vector<double> psi(n_cand);
  for (std::size_t k = 0; k < n_cand; ++k) psi[k] = entrotaxis_utility(ps, cg.endpoints[k], draws, model);

  std::vector<char> all(n_cand, 1);
  const int global_best = masked_best(cg, psi, all);
  const int feasible_best = masked_best(cg, psi, cg.feasible);
  const double feasible_psi = psi[static_cast<std::size_t>(feasible_best)];

  // Blocked candidates that beat the best reachable one count as jump
  // evidence for their direction (up to two per direction per move).
  std::vector<int> events(n_dir, 0);
  for (std::size_t k = 0; k < n_cand; ++k) {
    if (!cg.feasible[k] && psi[k] > feasible_psi) ++events[static_cast<std::size_t>(cg.direction[k])];
  }
  state.push(std::move(events), config.m_jump);

  if (!cg.feasible[static_cast<std::size_t>(global_best)]) {
    const int dir = cg.direction[static_cast<std::size_t>(global_best)];
    if (state.window_count(dir) >= config.n_jump) {
      const auto from = grid.world_to_cell(x_k);
      const auto to = grid.world_to_cell(cg.endpoints[static_cast<std::size_t>(global_best)]);
      if (from && to) {
        const std::vector<CellIndex> cells = grid_shortest_path(grid, *from, *to);
        if (!cells.empty()) {
          for (const CellIndex& c : cells) {
            const WorldPoint wp = grid.cell_center(c.row, c.col);
            if (step.waypoints.empty() && wp == x_k) continue;
            step.waypoints.push_back(wp);
          }
          const WorldPoint end = cg.endpoints[static_cast<std::size_t>(global_best)];
          if (step.waypoints.empty() || !(step.waypoints.back() == end)) step.waypoints.push_back(end);
          step.jumped = true;
          step.chosen_utility = psi[static_cast<std::size_t>(global_best)];
          state.reset_direction(dir);
          return step;
        }
      }
      // Unreachable endpoint: the jump aborts and the best feasible move runs.
    }
  }

  step.waypoints = {cg.endpoints[static_cast<std::size_t>(feasible_best)]};
  step.chosen_utility = feasible_psi;
  return step;
}

std::vector<double> skill_score(std::span<const double> sr, std::span<const double> mst, double w_sr, double w_mst) {
  if (sr.empty() || sr.size() != mst.size()) throw std::invalid_argument("skill_score: empty or mismatched inputs");
  const auto [sr_min_it, sr_max_it] = std::minmax_element(sr.begin(), sr.end());
  const auto [mst_min_it, mst_max_it] = std::minmax_element(mst.begin(), mst.end());
  const double sr_min = *sr_min_it, sr_max = *sr_max_it;
  const double mst_min = *mst_min_it, mst_max = *mst_max_it;

  std::vector<double> scores(sr.size());
  for (std::size_t i = 0; i < sr.size(); ++i) {
    const double s_sr = sr_max > sr_min ? (sr[i] - sr_min) / (sr_max - sr_min) : 1.0;
    const double s_mst = mst_max > mst_min ? (mst_max - mst[i]) / (mst_max - mst_min) : 1.0;
    scores[i] = w_sr * s_sr + w_mst * s_mst;
  }
  return scores;
}

}  // namespace plumesearch
