#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plumesearch/geometry.hpp"

namespace plumesearch {

struct CellIndex {
  int row = 0;
  int col = 0;
};
inline bool operator==(const CellIndex& a, const CellIndex& b) { return a.row == b.row && a.col == b.col; }

// Discretised 2D world. Cells are cell_size x cell_size squares; cell (0,0)
// has its lower-left corner at (origin_x, origin_y) and row 0 is the smallest
// y. Immutable after load; safe for concurrent reads.
struct OccupancyGrid {
  int rows = 0;
  int cols = 0;
  double cell_size = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<std::uint8_t> cells;  // row-major, 1 = obstacle

  static OccupancyGrid make(int rows, int cols, double cell_size, double origin_x = 0.0, double origin_y = 0.0);

  bool occupied(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col] != 0; }
  void set_occupied(int row, int col, bool v) { cells[static_cast<std::size_t>(row) * cols + col] = v ? 1 : 0; }
  bool cell_in_grid(int row, int col) const { return row >= 0 && row < rows && col >= 0 && col < cols; }

  int free_cell_count() const;
  double free_area() const { return free_cell_count() * cell_size * cell_size; }

  // Point -> cell (half-open cells; the top/right domain edge maps outside).
  std::optional<CellIndex> world_to_cell(const WorldPoint& p) const;
  WorldPoint cell_center(int row, int col) const {
    return {origin_x + (col + 0.5) * cell_size, origin_y + (row + 0.5) * cell_size};
  }
};

// Plain-text map I/O. Line 1: "rows cols cell_size origin_x origin_y";
// then `rows` lines of exactly `cols` characters from {0,1}, row 0 first.
// save_map(load_map(f)) round-trips byte-exactly.
OccupancyGrid load_map(const std::string& path);
OccupancyGrid parse_map(const std::string& text, const std::string& origin_name = "<string>");
void save_map(const OccupancyGrid& grid, const std::string& path);
std::string format_map(const OccupancyGrid& grid);

// Out-of-domain points and occupied cells are not free.
bool is_free(const OccupancyGrid& grid, const WorldPoint& p);

// True iff the closed segment [a,b] stays in-domain and touches no occupied
// cell. Supercover convention: a cell counts as touched whenever the segment
// meets its closed square, so corner contact is a collision.
bool segment_free(const OccupancyGrid& grid, const WorldPoint& a, const WorldPoint& b);

// Shortest-round-trip decimal formatting; shared by map and CSV writers so
// outputs are byte-deterministic.
std::string format_double(double v);

}  // namespace plumesearch
