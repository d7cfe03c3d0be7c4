#include <doctest.h>

#include <cmath>

#include "plumesearch/grid_map.hpp"
#include "support/oracles.hpp"

using namespace plumesearch;

TEST_CASE("map parsing: trivial grids") {
  const OccupancyGrid empty = parse_map("3 3 1 0 0\n000\n000\n000\n");
  CHECK(empty.rows == 3);
  CHECK(empty.cols == 3);
  CHECK(empty.free_cell_count() == 9);

  const OccupancyGrid one = parse_map("3 3 1 0 0\n000\n010\n000\n");
  CHECK(one.free_cell_count() == 8);
  CHECK_FALSE(is_free(one, one.cell_center(1, 1)));
  CHECK(is_free(one, one.cell_center(0, 1)));
}

TEST_CASE("map parsing: errors name the line") {
  CHECK_THROWS_WITH_AS(parse_map("", "f"), doctest::Contains("f:1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_map("x y\n", "f"), doctest::Contains("f:1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_map("2 3 1 0 0\n000\n00\n", "f"), doctest::Contains("f:3"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_map("2 3 1 0 0\n000\n0x0\n", "f"), doctest::Contains("f:3"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_map("2 3 1 0 0\n000\n", "f"), doctest::Contains("f:3"), std::runtime_error);
  CHECK_THROWS_AS(parse_map("0 3 1 0 0\n", "f"), std::runtime_error);
}

TEST_CASE("map round-trips byte-exactly") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const OccupancyGrid grid = testing::random_map(50, 50, 5.0, 0.3, rng);
    const std::string text = format_map(grid);
    const OccupancyGrid reloaded = parse_map(text);
    CHECK(format_map(reloaded) == text);
    CHECK(reloaded.cells == grid.cells);
  }
}

TEST_CASE("is_free: domain and occupancy") {
  OccupancyGrid grid = OccupancyGrid::make(3, 3, 1.0);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) grid.set_occupied(r, c, !(r == 1 && c == 1));
  }
  CHECK(is_free(grid, {1.5, 1.5}));
  CHECK_FALSE(is_free(grid, {-1.0, -1.0}));
  CHECK_FALSE(is_free(grid, {0.5, 0.5}));
  CHECK_FALSE(is_free(grid, {3.5, 1.5}));
}

TEST_CASE("is_free agrees with index arithmetic on random points") {
  Rng rng(7);
  const OccupancyGrid grid = testing::random_map(20, 30, 2.5, 0.25, rng);
  std::uniform_real_distribution<double> ux(-10.0, 85.0), uy(-10.0, 60.0);
  for (int i = 0; i < 1000; ++i) {
    const WorldPoint p{ux(rng), uy(rng)};
    const int col = static_cast<int>(std::floor(p.x / 2.5));
    const int row = static_cast<int>(std::floor(p.y / 2.5));
    const bool expected = row >= 0 && row < 20 && col >= 0 && col < 30 && !grid.occupied(row, col);
    CHECK(is_free(grid, p) == expected);
  }
}

TEST_CASE("segment_free: constructed cases") {
  OccupancyGrid grid = OccupancyGrid::make(4, 6, 1.0);
  grid.set_occupied(1, 3, true);

  SUBCASE("degenerate segment in a free cell") {
    CHECK(segment_free(grid, {0.5, 0.5}, {0.5, 0.5}));
  }
  SUBCASE("horizontal segment crossing the occupied cell") {
    const WorldPoint a{0.5, 1.5}, b{5.5, 1.5};
    CHECK_FALSE(segment_free(grid, a, b));
    CHECK(segment_free(grid, a, b) == testing::oracle_segment_free(grid, a, b));
  }
  SUBCASE("horizontal segment one row above passes") {
    CHECK(segment_free(grid, {0.5, 2.5}, {5.5, 2.5}));
  }
  SUBCASE("diagonal through a shared corner of two occupied cells collides") {
    OccupancyGrid corner = OccupancyGrid::make(4, 4, 1.0);
    corner.set_occupied(1, 2, true);
    corner.set_occupied(2, 1, true);
    // The segment from (0.5,0.5) to (3.5,3.5) passes exactly through (2,2),
    // the corner both obstacles share.
    const WorldPoint a{0.5, 0.5}, b{3.5, 3.5};
    CHECK_FALSE(segment_free(corner, a, b));
    CHECK(testing::oracle_segment_free(corner, a, b) == segment_free(corner, a, b));
  }
  SUBCASE("segment leaving the domain is not free") {
    CHECK_FALSE(segment_free(grid, {0.5, 0.5}, {7.5, 0.5}));
  }
}

TEST_CASE("segment_free matches the supercover oracle on random segments") {
  Rng rng(2024);
  std::uniform_real_distribution<double> coord(-2.0, 14.0);
  int checked = 0;
  for (int m = 0; m < 25; ++m) {
    const OccupancyGrid grid = testing::random_map(10, 12, 1.0, 0.2, rng);
    for (int i = 0; i < 450; ++i) {
      const WorldPoint a{coord(rng), coord(rng)};
      const WorldPoint b{coord(rng), coord(rng)};
      const bool got = segment_free(grid, a, b);
      const bool want = testing::oracle_segment_free(grid, a, b);
      if (got != want) {
        CAPTURE(a.x);
        CAPTURE(a.y);
        CAPTURE(b.x);
        CAPTURE(b.y);
      }
      REQUIRE(got == want);
      ++checked;
    }
  }
  CHECK(checked >= 10000);
}

TEST_CASE("segment_free properties: symmetry, endpoints, subsegments") {
  Rng rng(9);
  std::uniform_real_distribution<double> coord(0.0, 12.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const OccupancyGrid grid = testing::random_map(12, 12, 1.0, 0.25, rng);
  for (int i = 0; i < 2000; ++i) {
    const WorldPoint a{coord(rng), coord(rng)};
    const WorldPoint b{coord(rng), coord(rng)};
    const bool ab = segment_free(grid, a, b);
    CHECK(ab == segment_free(grid, b, a));
    if (ab) {
      CHECK(is_free(grid, a));
      CHECK(is_free(grid, b));
      const double t = unit(rng);
      const WorldPoint m{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
      CHECK(segment_free(grid, a, m));
    }
  }
}
