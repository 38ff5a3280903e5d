#include "eagers/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eagers/error.hpp"

namespace eagers {
namespace {

// round(i * extent / parts), halves rounded up, in exact integer arithmetic.
int boundary(int i, int extent, int parts) {
  const std::int64_t num = 2LL * i * extent + parts;
  return static_cast<int>(num / (2LL * parts));
}

void check_grid(const GridSpec& grid) {
  if (!grid.valid()) {
    throw Error(ErrorKind::kInvalidGeometry,
                "grid must have at least one column and row, got " +
                    std::to_string(grid.cols) + "x" + std::to_string(grid.rows));
  }
}

}  // namespace

std::vector<GridCell> partition(int width, int height, const GridSpec& grid) {
  check_grid(grid);
  if (width < grid.cols || height < grid.rows) {
    throw Error(ErrorKind::kInvalidGeometry,
                "image " + std::to_string(width) + "x" + std::to_string(height) +
                    " is smaller than grid " + std::to_string(grid.cols) + "x" +
                    std::to_string(grid.rows));
  }
  std::vector<GridCell> cells;
  cells.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (int r = 0; r < grid.rows; ++r) {
    const int y0 = boundary(r, height, grid.rows);
    const int y1 = boundary(r + 1, height, grid.rows);
    for (int c = 0; c < grid.cols; ++c) {
      cells.push_back({{r, c}, {boundary(c, width, grid.cols), y0, boundary(c + 1, width, grid.cols), y1}});
    }
  }
  return cells;
}

int selection_count(const GridSpec& grid) {
  check_grid(grid);
  // ceil(0.3 * n) without floating point.
  return (3 * grid.cell_count() + 9) / 10;
}

Rect expand_margin(const Rect& cell, double margin_fraction, int width, int height) {
  if (!(margin_fraction >= 0.0 && margin_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidGeometry, "margin fraction must be in [0, 1]");
  }
  if (!cell.within(width, height)) {
    throw Error(ErrorKind::kInvalidGeometry, "cell lies outside the image");
  }
  const int dx = static_cast<int>(std::lround(margin_fraction * cell.width()));
  const int dy = static_cast<int>(std::lround(margin_fraction * cell.height()));
  return {std::max(0, cell.x0 - dx), std::max(0, cell.y0 - dy), std::min(width, cell.x1 + dx),
          std::min(height, cell.y1 + dy)};
}

std::vector<Rect> visible_region(std::span<const CellIndex> selected, const GridSpec& grid,
                                 double margin_fraction, int width, int height) {
  if (selected.empty()) {
    throw Error(ErrorKind::kInvalidSelection, "no cells selected");
  }
  const auto cells = partition(width, height, grid);
  std::vector<Rect> out;
  out.reserve(selected.size());
  for (const auto& idx : selected) {
    if (!idx.valid(grid)) {
      throw Error(ErrorKind::kInvalidSelection,
                  "cell (" + std::to_string(idx.row) + "," + std::to_string(idx.col) +
                      ") is outside the grid");
    }
    out.push_back(expand_margin(cells[static_cast<std::size_t>(idx.linear(grid))].rect,
                                margin_fraction, width, height));
  }
  return out;
}

}  // namespace eagers
