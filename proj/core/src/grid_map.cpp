#include "plumesearch/grid_map.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plumesearch {

OccupancyGrid OccupancyGrid::make(int rows, int cols, double cell_size, double origin_x, double origin_y) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be > 0");
  OccupancyGrid g;
  g.rows = rows;
  g.cols = cols;
  g.cell_size = cell_size;
  g.origin_x = origin_x;
  g.origin_y = origin_y;
  g.cells.assign(static_cast<std::size_t>(rows) * cols, 0);
  return g;
}

int OccupancyGrid::free_cell_count() const {
  return static_cast<int>(std::count(cells.begin(), cells.end(), std::uint8_t{0}));
}

std::optional<CellIndex> OccupancyGrid::world_to_cell(const WorldPoint& p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
  const int col = static_cast<int>(std::floor((p.x - origin_x) / cell_size));
  const int row = static_cast<int>(std::floor((p.y - origin_y) / cell_size));
  if (!cell_in_grid(row, col)) return std::nullopt;
  return CellIndex{row, col};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << what;
  throw std::runtime_error(os.str());
}

}  // namespace

OccupancyGrid parse_map(const std::string& text, const std::string& origin_name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) parse_fail(origin_name, 1, "empty map file");

  int rows = 0, cols = 0;
  double cell_size = 0.0, ox = 0.0, oy = 0.0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> rows >> cols >> cell_size >> ox >> oy)) {
      parse_fail(origin_name, 1, "malformed header, expected 'rows cols cell_size origin_x origin_y'");
    }
    std::string extra;
    if (hdr >> extra) parse_fail(origin_name, 1, "trailing tokens in header");
    if (rows < 1 || cols < 1) parse_fail(origin_name, 1, "rows and cols must be >= 1");
    if (!(cell_size > 0.0)) parse_fail(origin_name, 1, "cell_size must be > 0");
  }

  OccupancyGrid grid = OccupancyGrid::make(rows, cols, cell_size, ox, oy);
  for (int r = 0; r < rows; ++r) {
    const int line_no = r + 2;
    if (!std::getline(in, line)) parse_fail(origin_name, line_no, "unexpected end of file, expected a grid row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != cols) {
      parse_fail(origin_name, line_no,
                 "row has " + std::to_string(line.size()) + " cells, expected " + std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) {
      const char ch = line[static_cast<std::size_t>(c)];
      if (ch != '0' && ch != '1') parse_fail(origin_name, line_no, std::string("invalid cell symbol '") + ch + "'");
      grid.set_occupied(r, c, ch == '1');
    }
  }
  return grid;
}

OccupancyGrid load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str(), path);
}

std::string format_map(const OccupancyGrid& grid) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.rows) * (grid.cols + 1) + 64);
  out += std::to_string(grid.rows);
  out += ' ';
  out += std::to_string(grid.cols);
  out += ' ';
  out += format_double(grid.cell_size);
  out += ' ';
  out += format_double(grid.origin_x);
  out += ' ';
  out += format_double(grid.origin_y);
  out += '\n';
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) out += grid.occupied(r, c) ? '1' : '0';
    out += '\n';
  }
  return out;
}

void save_map(const OccupancyGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  out << format_map(grid);
}

bool is_free(const OccupancyGrid& grid, const WorldPoint& p) {
  const auto cell = grid.world_to_cell(p);
  if (!cell) return false;
  return !grid.occupied(cell->row, cell->col);
}

namespace {

// Index range of cells whose closed interval [i*cs, (i+1)*cs] meets [lo, hi]
// (coordinates relative to the grid origin). A value exactly on a cell
// boundary touches the cell below it as well.
void touched_range(double lo, double hi, double cs, int& i0, int& i1) {
  i0 = static_cast<int>(std::floor(lo / cs));
  if (static_cast<double>(i0) * cs == lo) --i0;
  i1 = static_cast<int>(std::floor(hi / cs));
}

}  // namespace

bool segment_free(const OccupancyGrid& grid, const WorldPoint& a, const WorldPoint& b) {
  if (!is_free(grid, a) || !is_free(grid, b)) return false;

  const double cs = grid.cell_size;
  const double ax = a.x - grid.origin_x, ay = a.y - grid.origin_y;
  const double bx = b.x - grid.origin_x, by = b.y - grid.origin_y;
  const double dx = bx - ax, dy = by - ay;

  int r0 = 0, r1 = 0;
  touched_range(std::min(ay, by), std::max(ay, by), cs, r0, r1);
  r0 = std::max(r0, 0);
  r1 = std::min(r1, grid.rows - 1);

  for (int r = r0; r <= r1; ++r) {
    const double ylo = r * cs, yhi = (r + 1) * cs;
    double t0 = 0.0, t1 = 1.0;
    if (dy == 0.0) {
      if (ay < ylo || ay > yhi) continue;
    } else {
      double ta = (ylo - ay) / dy;
      double tb = (yhi - ay) / dy;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(0.0, ta);
      t1 = std::min(1.0, tb);
      if (t0 > t1) continue;
    }
    const double xa = ax + t0 * dx, xb = ax + t1 * dx;
    int c0 = 0, c1 = 0;
    touched_range(std::min(xa, xb), std::max(xa, xb), cs, c0, c1);
    c0 = std::max(c0, 0);
    c1 = std::min(c1, grid.cols - 1);
    for (int c = c0; c <= c1; ++c) {
      if (grid.occupied(r, c)) return false;
    }
  }
  return true;
}

}  // namespace plumesearch
