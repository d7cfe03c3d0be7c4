#include <doctest.h>

#include <cmath>
#include <map>

#include "plumesearch/wind_sampler.hpp"
#include "support/oracles.hpp"

using namespace plumesearch;

TEST_CASE("inlet_states: edge selection follows the wind") {
  const OccupancyGrid grid = OccupancyGrid::make(5, 8, 1.0);

  SUBCASE("wind from the west selects the col 0 edge") {
    const auto inlet = inlet_states(grid, 270.0);
    REQUIRE(inlet.size() == 5);
    for (const CellIndex& c : inlet) CHECK(c.col == 0);
  }
  SUBCASE("wind from the east selects the opposite edge") {
    const auto inlet = inlet_states(grid, 90.0);
    REQUIRE(inlet.size() == 5);
    for (const CellIndex& c : inlet) CHECK(c.col == 7);
  }
  SUBCASE("44 degrees off still snaps to the west edge") {
    for (double phi : {270.0 - 44.0, 270.0 + 44.0}) {
      const auto inlet = inlet_states(grid, phi);
      for (const CellIndex& c : inlet) CHECK(c.col == 0);
    }
  }
  SUBCASE("wind from the north selects the top row") {
    const auto inlet = inlet_states(grid, 0.0);
    REQUIRE(inlet.size() == 8);
    for (const CellIndex& c : inlet) CHECK(c.row == 4);
  }
}

TEST_CASE("dijkstra_cost: line metric on an open strip") {
  const OccupancyGrid grid = OccupancyGrid::make(1, 10, 2.0);
  const CostField field = dijkstra_cost(grid, {{0, 0}}, true);
  for (int c = 0; c < 10; ++c) CHECK(field.at(0, c) == doctest::Approx(2.0 * c).epsilon(1e-12));
}

TEST_CASE("dijkstra_cost: walls force detours, sealed regions stay infinite") {
  OccupancyGrid grid = OccupancyGrid::make(5, 5, 1.0);
  for (int r = 0; r < 4; ++r) grid.set_occupied(r, 2, true);

  const CostField field = dijkstra_cost(grid, {{0, 0}}, true);
  const auto oracle = testing::oracle_grid_costs(grid, {{0, 0}}, true);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      if (std::isinf(oracle[r * 5 + c])) {
        CHECK(std::isinf(field.at(r, c)));
      } else {
        CHECK(field.at(r, c) == doctest::Approx(oracle[r * 5 + c]).epsilon(1e-12));
      }
    }
  }
  // Around the wall: up to row 4, across, and back down.
  CHECK(field.at(0, 4) > 4.0);

  OccupancyGrid sealed = grid;
  for (int r = 0; r < 5; ++r) sealed.set_occupied(r, 2, true);
  const CostField f2 = dijkstra_cost(sealed, {{0, 0}}, true);
  for (int r = 0; r < 5; ++r) CHECK(std::isinf(f2.at(r, 4)));
  CHECK_THROWS_AS(dijkstra_cost(grid, {}, true), std::invalid_argument);
}

TEST_CASE("dijkstra_cost matches the brute-force oracle on random maps") {
  Rng rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    const OccupancyGrid grid = testing::random_map(10, 12, 1.5, 0.25, rng);
    const std::vector<CellIndex> inlet = inlet_states(grid, 270.0);
    for (bool respect : {true, false}) {
      const CostField field = dijkstra_cost(grid, inlet, respect);
      const auto oracle = testing::oracle_grid_costs(grid, inlet, respect);
      for (int id = 0; id < grid.rows * grid.cols; ++id) {
        if (std::isinf(oracle[static_cast<std::size_t>(id)])) {
          CHECK(std::isinf(field.cost[static_cast<std::size_t>(id)]));
        } else {
          CHECK(field.cost[static_cast<std::size_t>(id)] ==
                doctest::Approx(oracle[static_cast<std::size_t>(id)]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("obstacles never shorten paths from the inlet") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const OccupancyGrid grid = testing::random_map(15, 20, 2.0, 0.2, rng);
    const auto inlet = inlet_states(grid, 270.0);
    const CostField c_obs = dijkstra_cost(grid, inlet, true);
    const CostField c_open = dijkstra_cost(grid, inlet, false);
    for (int id = 0; id < grid.rows * grid.cols; ++id) {
      if (grid.cells[static_cast<std::size_t>(id)] != 0) continue;
      if (!std::isfinite(c_obs.cost[static_cast<std::size_t>(id)])) continue;
      CHECK(c_obs.cost[static_cast<std::size_t>(id)] >= c_open.cost[static_cast<std::size_t>(id)] - 1e-12);
    }
  }
}

TEST_CASE("build_distribution: obstacle-free map is uniform") {
  const OccupancyGrid grid = OccupancyGrid::make(10, 10, 1.0);
  const SampleDistribution dist = build_distribution(grid, 270.0);
  REQUIRE(dist.free_cells.size() == 100);
  for (double w : dist.weights) CHECK(w == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("build_distribution: wake behind a block is down-weighted") {
  // Wind towards +x; one rectangular block. Compare the block's lee strip
  // against the open strip beside it.
  OccupancyGrid grid = OccupancyGrid::make(40, 40, 1.0);
  for (int r = 15; r < 25; ++r) {
    for (int c = 10; c < 14; ++c) grid.set_occupied(r, c, true);
  }
  const SampleDistribution dist = build_distribution(grid, 270.0);

  for (double w : dist.weights) CHECK(w > 0.0);
  double total = 0.0;
  for (double w : dist.weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  double lee = 0.0, open = 0.0;
  int lee_n = 0, open_n = 0;
  for (int r = 15; r < 25; ++r) {
    for (int c = 14; c < 26; ++c) {
      lee += dist.weight_at(r, c);
      ++lee_n;
    }
  }
  for (int r = 2; r < 12; ++r) {
    for (int c = 14; c < 26; ++c) {
      open += dist.weight_at(r, c);
      ++open_n;
    }
  }
  CHECK(lee / lee_n < open / open_n);
}

TEST_CASE("build_distribution: no free cells is a configuration error") {
  OccupancyGrid grid = OccupancyGrid::make(2, 2, 1.0);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) grid.set_occupied(r, c, true);
  }
  CHECK_THROWS_AS(build_distribution(grid, 270.0), std::runtime_error);
}

TEST_CASE("draw_samples: counts, support, determinism") {
  SUBCASE("two-cell uniform split within 3 sigma") {
    const OccupancyGrid grid = OccupancyGrid::make(1, 2, 1.0);
    const SampleDistribution dist = build_uniform_distribution(grid);
    Rng rng(31);
    const auto pts = draw_samples(dist, grid, 10000, rng);
    int left = 0;
    for (const WorldPoint& p : pts) left += p.x < 1.0 ? 1 : 0;
    const double sigma = std::sqrt(10000 * 0.25);
    CHECK(std::abs(left - 5000) <= 3.0 * sigma);
  }
  SUBCASE("every sample lands in free space") {
    Rng rng(8);
    const OccupancyGrid grid = testing::random_map(12, 12, 1.0, 0.35, rng);
    const SampleDistribution dist = build_distribution(grid, 270.0);
    const auto pts = draw_samples(dist, grid, 20000, rng);
    for (const WorldPoint& p : pts) REQUIRE(is_free(grid, p));
  }
  SUBCASE("fixed seeds reproduce the draw") {
    const OccupancyGrid grid = OccupancyGrid::make(6, 6, 1.0);
    const SampleDistribution dist = build_uniform_distribution(grid);
    Rng a(5), b(5);
    const auto pa = draw_samples(dist, grid, 100, a);
    const auto pb = draw_samples(dist, grid, 100, b);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
  }
}

TEST_CASE("draw_samples: frequencies follow the weights (chi-squared)") {
  OccupancyGrid grid = OccupancyGrid::make(2, 3, 1.0);
  grid.set_occupied(1, 2, true);
  const SampleDistribution dist = build_uniform_distribution(grid);
  Rng rng(4);
  const int n = 100000;
  const auto pts = draw_samples(dist, grid, n, rng);

  std::map<int, int> counts;
  for (const WorldPoint& p : pts) {
    const auto cell = grid.world_to_cell(p);
    REQUIRE(cell.has_value());
    ++counts[cell->row * 3 + cell->col];
  }
  double chi2 = 0.0;
  for (std::size_t k = 0; k < dist.free_cells.size(); ++k) {
    const double expected = dist.weights[k] * n;
    const double observed = counts[dist.free_cells[k]];
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  // 4 degrees of freedom; 0.999 quantile is 18.47.
  CHECK(chi2 < 18.47);
}

TEST_CASE("grid_shortest_path: straight, detour, unreachable") {
  OccupancyGrid grid = OccupancyGrid::make(5, 7, 1.0);
  SUBCASE("straight line") {
    const auto path = grid_shortest_path(grid, {2, 0}, {2, 6});
    REQUIRE(path.size() == 7);
    CHECK(path.front() == CellIndex{2, 0});
    CHECK(path.back() == CellIndex{2, 6});
  }
  SUBCASE("detour around a wall") {
    for (int r = 0; r < 4; ++r) grid.set_occupied(r, 3, true);
    const auto path = grid_shortest_path(grid, {0, 0}, {0, 6});
    REQUIRE(!path.empty());
    CHECK(path.back() == CellIndex{0, 6});
    bool visits_top = false;
    for (const CellIndex& c : path) {
      CHECK_FALSE(grid.occupied(c.row, c.col));
      visits_top |= c.row == 4;
    }
    CHECK(visits_top);
  }
  SUBCASE("sealed target returns empty") {
    for (int r = 0; r < 5; ++r) grid.set_occupied(r, 3, true);
    CHECK(grid_shortest_path(grid, {0, 0}, {0, 6}).empty());
  }
}
