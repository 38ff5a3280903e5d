#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace eagers {

struct GridSpec {
  int cols = 1;
  int rows = 1;

  int cell_count() const noexcept { return cols * rows; }
  bool valid() const noexcept { return cols >= 1 && rows >= 1; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  std::int64_t area() const noexcept {
    return static_cast<std::int64_t>(width()) * height();
  }
  bool empty() const noexcept { return x0 >= x1 || y0 >= y1; }
  bool contains(int x, int y) const noexcept {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  bool contains(const Rect& other) const noexcept {
    return other.x0 >= x0 && other.y0 >= y0 && other.x1 <= x1 && other.y1 <= y1;
  }
  bool within(int width, int height) const noexcept {
    return x0 >= 0 && y0 >= 0 && !empty() && x1 <= width && y1 <= height;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct CellIndex {
  int row = 0;
  int col = 0;

  int linear(const GridSpec& grid) const noexcept { return row * grid.cols + col; }
  static CellIndex from_linear(int linear, const GridSpec& grid) noexcept {
    return {linear / grid.cols, linear % grid.cols};
  }
  bool valid(const GridSpec& grid) const noexcept {
    return row >= 0 && row < grid.rows && col >= 0 && col < grid.cols;
  }

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct GridCell {
  CellIndex index;
  Rect rect;
};

/// Splits a width x height image into grid.cols x grid.rows cells in
/// row-major order. Boundary i along an axis sits at round(i * extent / axis),
/// so the cells tile the image with no gaps or overlaps.
std::vector<GridCell> partition(int width, int height, const GridSpec& grid);

/// Number of cells kept as evidence: ceil(0.30 * cell_count).
int selection_count(const GridSpec& grid);

/// Grows `cell` by round(margin * cell width) horizontally and
/// round(margin * cell height) vertically on each side, clamped to the image.
Rect expand_margin(const Rect& cell, double margin_fraction, int width, int height);

/// Margin-expanded rects for every selected cell. The rects may overlap;
/// the mask takes their union.
std::vector<Rect> visible_region(std::span<const CellIndex> selected, const GridSpec& grid,
                                 double margin_fraction, int width, int height);

}  // namespace eagers
