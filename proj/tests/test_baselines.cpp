#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "plumesearch/baselines.hpp"

using namespace plumesearch;

namespace {

ParticleSet spread_posterior(Rng& rng, int n = 50) {
  std::uniform_real_distribution<double> coord(20.0, 80.0);
  ParticleSet ps;
  for (int i = 0; i < n; ++i) {
    SourceTerm t;
    t.s_x = coord(rng);
    t.s_y = coord(rng);
    t.q = 1000.0;
    t.u = 2.0;
    t.phi = 270.0;
    t.d = 1.0;
    t.tau = 8.0;
    ps.particles.push_back(t);
    ps.weights.push_back(1.0 / n);
  }
  return ps;
}

const LikelihoodModel kModel{0.3, 0.01, 0.5};

}  // namespace

TEST_CASE("entrotaxis_step: open map evaluates the full action set") {
  const OccupancyGrid grid = OccupancyGrid::make(100, 100, 1.0);
  BaselineConfig config;
  Rng rng(1);
  ParticleSet ps = spread_posterior(rng);

  const BaselineStep step = entrotaxis_step(ps, {50.0, 50.0}, grid, 8, kModel, false, config, rng);
  CHECK(step.candidates_evaluated == 16);
  CHECK_FALSE(step.stalled);
  REQUIRE(step.waypoints.size() == 1);
  const double moved = distance(step.waypoints[0], {50.0, 50.0});
  CHECK((std::abs(moved - 10.0) < 1e-9 || std::abs(moved - 20.0) < 1e-9));
}

TEST_CASE("entrotaxis_step: a wall discards the candidates pointing at it") {
  // Wall immediately east of the robot: the 3 east-pointing directions lose
  // both step sizes.
  OccupancyGrid grid = OccupancyGrid::make(100, 100, 1.0);
  for (int r = 0; r < 100; ++r) grid.set_occupied(r, 55, true);
  BaselineConfig config;
  Rng rng(2);
  ParticleSet ps = spread_posterior(rng);

  const BaselineStep step = entrotaxis_step(ps, {50.5, 50.5}, grid, 8, kModel, false, config, rng);
  CHECK(step.candidates_evaluated == 10);
  REQUIRE(step.waypoints.size() == 1);
  CHECK(step.waypoints[0].x < 55.0);
}

TEST_CASE("entrotaxis_step: fully boxed in stalls at the current position") {
  OccupancyGrid grid = OccupancyGrid::make(20, 20, 1.0);
  for (int k = 8; k <= 12; ++k) {
    grid.set_occupied(8, k, true);
    grid.set_occupied(12, k, true);
    grid.set_occupied(k, 8, true);
    grid.set_occupied(k, 12, true);
  }
  BaselineConfig config;
  Rng rng(3);
  ParticleSet ps = spread_posterior(rng);
  const WorldPoint center{10.5, 10.5};
  const BaselineStep step = entrotaxis_step(ps, center, grid, 8, kModel, false, config, rng);
  CHECK(step.stalled);
  REQUIRE(step.waypoints.size() == 1);
  CHECK(step.waypoints[0] == center);
}

TEST_CASE("entrotaxis_step: deterministic under a fixed seed") {
  const OccupancyGrid grid = OccupancyGrid::make(100, 100, 1.0);
  BaselineConfig config;
  Rng seed_rng(4);
  ParticleSet ps = spread_posterior(seed_rng);
  Rng a(9), b(9);
  const BaselineStep sa = entrotaxis_step(ps, {50.0, 50.0}, grid, 8, kModel, false, config, a);
  const BaselineStep sb = entrotaxis_step(ps, {50.0, 50.0}, grid, 8, kModel, false, config, b);
  CHECK(sa.waypoints[0] == sb.waypoints[0]);
}

TEST_CASE("jump_step: open map matches entrotaxis") {
  const OccupancyGrid grid = OccupancyGrid::make(100, 100, 1.0);
  BaselineConfig config;
  Rng seed_rng(5);
  ParticleSet ps = spread_posterior(seed_rng);

  Rng a(11), b(11);
  JumpState state;
  const BaselineStep ent = entrotaxis_step(ps, {50.0, 50.0}, grid, 8, kModel, false, config, a);
  const BaselineStep jmp = jump_step(ps, {50.0, 50.0}, grid, state, 8, kModel, false, config, b);
  CHECK_FALSE(jmp.jumped);
  CHECK(jmp.waypoints[0] == ent.waypoints[0]);
  // No blocked candidates anywhere, so no events accumulate.
  for (std::size_t d = 0; d < config.directions_deg.size(); ++d) CHECK(state.window_count(static_cast<int>(d)) == 0);
}

TEST_CASE("jump_step: repeated blocked argmin triggers a collision-free jump") {
  // The posterior pulls east through a wall: hypotheses scattered just past
  // it make the blocked east candidates the most informative ones, while
  // everything reachable sits in clean air.
  OccupancyGrid grid = OccupancyGrid::make(40, 40, 1.0);
  for (int r = 5; r < 35; ++r) grid.set_occupied(r, 20, true);

  BaselineConfig config;
  config.step_sizes = {10.0};
  config.n_jump = 4;
  config.m_jump = 10;

  const WorldPoint x_k{15.5, 20.5};
  ParticleSet ps;
  Rng scatter(3);
  std::normal_distribution<double> dx(28.0, 3.0), dy(20.5, 3.0);
  for (int i = 0; i < 30; ++i) {
    SourceTerm t;
    t.s_x = dx(scatter);
    t.s_y = dy(scatter);
    t.q = 2000.0;
    t.u = 2.0;
    t.phi = 90.0;  // wind from the east: the plumes blow over the robot
    t.d = 1.0;
    t.tau = 8.0;
    ps.particles.push_back(t);
    ps.weights.push_back(1.0 / 30.0);
  }

  Rng rng(6);
  JumpState state;
  bool jumped = false;
  std::vector<WorldPoint> route;
  for (int move = 0; move < 10 && !jumped; ++move) {
    const BaselineStep step = jump_step(ps, x_k, grid, state, 8, kModel, false, config, rng);
    CHECK(static_cast<int>(state.history.size()) <= config.m_jump);
    if (step.jumped) {
      jumped = true;
      route = step.waypoints;
    }
  }
  REQUIRE(jumped);
  REQUIRE(route.size() >= 2);
  // The route ends at a blocked-direction endpoint east of the wall and is
  // collision-free throughout.
  CHECK(route.back().x > 20.0);
  WorldPoint prev = x_k;
  for (const WorldPoint& wp : route) {
    CHECK(segment_free(grid, prev, wp));
    prev = wp;
  }
}

TEST_CASE("jump_step: history window never exceeds m_jump") {
  OccupancyGrid grid = OccupancyGrid::make(40, 40, 1.0);
  for (int r = 0; r < 40; ++r) grid.set_occupied(r, 20, true);
  ParticleSet ps;
  SourceTerm t;
  t.s_x = 30.0;
  t.s_y = 20.0;
  t.q = 2000.0;
  t.u = 2.0;
  t.phi = 270.0;
  t.d = 1.0;
  t.tau = 8.0;
  ps.particles.assign(10, t);
  ps.weights.assign(10, 0.1);

  BaselineConfig config;
  config.n_jump = 1000;  // never actually jump
  config.m_jump = 6;
  Rng rng(7);
  JumpState state;
  for (int move = 0; move < 20; ++move) {
    jump_step(ps, {15.5, 20.5}, grid, state, 8, kModel, false, config, rng);
    CHECK(static_cast<int>(state.history.size()) <= config.m_jump);
  }
  CHECK(static_cast<int>(state.history.size()) == config.m_jump);
}

TEST_CASE("skill_score: hand cases and degeneracies") {
  SUBCASE("worked two-config example") {
    const std::vector<double> sr{0.5, 1.0}, mst{2000.0, 1000.0};
    const auto scores = skill_score(sr, mst, 0.5, 0.5);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == doctest::Approx(0.0));
    CHECK(scores[1] == doctest::Approx(1.0));
  }
  SUBCASE("double maximiser scores exactly 1") {
    const std::vector<double> sr{0.2, 0.9, 0.6}, mst{1500.0, 800.0, 1200.0};
    const auto scores = skill_score(sr, mst, 0.5, 0.5);
    CHECK(scores[1] == doctest::Approx(1.0));
    for (double s : scores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
  SUBCASE("identical configs all score 1") {
    const std::vector<double> sr{0.7, 0.7}, mst{900.0, 900.0};
    const auto scores = skill_score(sr, mst, 0.5, 0.5);
    CHECK(scores[0] == doctest::Approx(1.0));
    CHECK(scores[1] == doctest::Approx(1.0));
  }
  SUBCASE("jointly rescaling MST leaves the scores unchanged") {
    const std::vector<double> sr{0.4, 0.8, 0.6}, mst{1800.0, 900.0, 1300.0};
    std::vector<double> scaled;
    for (double m : mst) scaled.push_back(3.5 * m + 250.0);
    const auto a = skill_score(sr, mst, 0.5, 0.5);
    const auto b = skill_score(sr, scaled, 0.5, 0.5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
  SUBCASE("empty input throws") {
    CHECK_THROWS_AS(skill_score({}, {}, 0.5, 0.5), std::invalid_argument);
  }
}
