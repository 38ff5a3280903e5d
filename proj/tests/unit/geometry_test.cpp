#include "eagers/geometry.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "eagers/error.hpp"

namespace eagers {
namespace {

TEST(Partition, FiveByFiveOnThousandSquare) {
  const auto cells = partition(1000, 1000, {5, 5});
  ASSERT_EQ(cells.size(), 25u);
  EXPECT_EQ(cells[0].rect, (Rect{0, 0, 200, 200}));
  EXPECT_EQ(cells[24].rect, (Rect{800, 800, 1000, 1000}));
  EXPECT_EQ(cells[7].index, (CellIndex{1, 2}));
}

TEST(Partition, NonSquareImage) {
  const auto cells = partition(1000, 500, {5, 5});
  EXPECT_EQ(cells[0].rect, (Rect{0, 0, 200, 100}));
  EXPECT_EQ(cells[24].rect, (Rect{800, 400, 1000, 500}));
}

TEST(Partition, UnitCells) {
  for (const auto& c : partition(7, 3, {7, 3})) {
    EXPECT_EQ(c.rect.area(), 1);
    EXPECT_EQ(c.rect.x0, c.index.col);
    EXPECT_EQ(c.rect.y0, c.index.row);
  }
}

TEST(Partition, BoundariesOnOddExtent) {
  const auto cells = partition(1003, 501, {5, 5});
  const std::vector<int> want = {0, 201, 401, 602, 802, 1003};
  for (int c = 0; c < 5; ++c) {
    EXPECT_EQ(cells[c].rect.x0, want[c]);
    EXPECT_EQ(cells[c].rect.x1, want[c + 1]);
  }
}

TEST(Partition, UnevenExtentsRoundBoundaries) {
  // 10 px over 3 columns: boundaries 0, round(3.33)=3, round(6.67)=7, 10.
  const auto cells = partition(10, 4, {3, 1});
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].rect.x1, 3);
  EXPECT_EQ(cells[1].rect.x1, 7);
  EXPECT_EQ(cells[2].rect.x1, 10);
}

TEST(Partition, HalfwayBoundaryRoundsUp) {
  // 5 px over 2 columns: 2.5 -> 3.
  const auto cells = partition(5, 1, {2, 1});
  EXPECT_EQ(cells[0].rect.x1, 3);
}

TEST(Partition, GridLargerThanImageIsRejected) {
  try {
    partition(4, 4, {5, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidGeometry);
  }
  EXPECT_THROW(partition(0, 10, {1, 1}), Error);
  EXPECT_THROW(partition(10, 10, {0, 1}), Error);
}

TEST(Partition, TilesExactlyUnderRandomShapes) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> extent(1, 300);
  std::uniform_int_distribution<int> axis(1, 12);
  for (int t = 0; t < 300; ++t) {
    const GridSpec g{axis(rng), axis(rng)};
    const int w = std::max(extent(rng), g.cols);
    const int h = std::max(extent(rng), g.rows);
    const auto cells = partition(w, h, g);
    ASSERT_EQ(static_cast<int>(cells.size()), g.cell_count());
    std::vector<int> cover(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      ASSERT_EQ(c.index.linear(g), static_cast<int>(i));
      ASSERT_TRUE(c.rect.within(w, h));
      for (int y = c.rect.y0; y < c.rect.y1; ++y)
        for (int x = c.rect.x0; x < c.rect.x1; ++x) ++cover[static_cast<std::size_t>(y) * w + x];
    }
    for (int v : cover) ASSERT_EQ(v, 1) << w << "x" << h << " grid " << g.cols << "x" << g.rows;
  }
}

TEST(SelectionCount, RoundsUpThirtyPercent) {
  EXPECT_EQ(selection_count({5, 5}), 8);
  EXPECT_EQ(selection_count({5, 10}), 15);
  EXPECT_EQ(selection_count({1, 1}), 1);
  EXPECT_EQ(selection_count({2, 5}), 3);
  EXPECT_EQ(selection_count({3, 3}), 3);  // 2.7
  for (int n = 1; n <= 400; ++n) {
    const int k = selection_count({n, 1});
    EXPECT_GE(10 * k, 3 * n);
    EXPECT_LT(10 * (k - 1), 3 * n);
  }
}

TEST(ExpandMargin, GrowsPerAxisAndClamps) {
  const Rect cell{200, 100, 400, 200};
  EXPECT_EQ(expand_margin(cell, 0.15, 1000, 500), (Rect{170, 85, 430, 215}));
  EXPECT_EQ(expand_margin({0, 0, 200, 100}, 0.15, 1000, 500), (Rect{0, 0, 230, 115}));
  EXPECT_EQ(expand_margin(cell, 0.0, 1000, 1000), cell);
  EXPECT_EQ(expand_margin({0, 0, 100, 100}, 0.5, 120, 120), (Rect{0, 0, 120, 120}));
  EXPECT_THROW(expand_margin(cell, -0.1, 1000, 1000), Error);
}

TEST(ExpandMargin, MonotoneInMargin) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coord(0, 199);
  std::uniform_real_distribution<double> m(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    int x0 = coord(rng), x1 = coord(rng), y0 = coord(rng), y1 = coord(rng);
    if (x0 == x1 || y0 == y1) continue;
    const Rect r{std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
    double a = m(rng), b = m(rng);
    if (a > b) std::swap(a, b);
    const Rect ra = expand_margin(r, a, 200, 200);
    const Rect rb = expand_margin(r, b, 200, 200);
    EXPECT_TRUE(ra.contains(r));
    EXPECT_TRUE(rb.contains(ra));
    EXPECT_TRUE(rb.within(200, 200));
  }
}

TEST(VisibleRegion, OneRectPerSelectedCell) {
  const std::vector<CellIndex> sel = {{0, 0}, {4, 4}};
  const auto rects = visible_region(sel, {5, 5}, 0.0, 500, 500);
  ASSERT_EQ(rects.size(), 2u);
  EXPECT_EQ(rects[0], (Rect{0, 0, 100, 100}));
  EXPECT_EQ(rects[1], (Rect{400, 400, 500, 500}));
}

TEST(VisibleRegion, AdjacentCellsOverlapAfterMargin) {
  const std::vector<CellIndex> sel = {{0, 0}, {0, 1}};
  const auto rects = visible_region(sel, {5, 5}, 0.15, 500, 500);
  ASSERT_EQ(rects.size(), 2u);
  std::int64_t union_area = 0;
  for (int y = 0; y < 500; ++y)
    for (int x = 0; x < 500; ++x) union_area += (rects[0].contains(x, y) || rects[1].contains(x, y)) ? 1 : 0;
  EXPECT_LT(union_area, rects[0].area() + rects[1].area());
}

TEST(VisibleRegion, AllCellsCoverImage) {
  std::vector<CellIndex> all;
  for (const auto& c : partition(90, 70, {3, 4})) all.push_back(c.index);
  std::int64_t area = 0;
  for (const auto& r : visible_region(all, {3, 4}, 0.0, 90, 70)) area += r.area();
  EXPECT_EQ(area, 90 * 70);
}

TEST(VisibleRegion, RejectsOutOfGridAndEmpty) {
  const std::vector<CellIndex> bad = {{5, 0}};
  EXPECT_THROW(visible_region(bad, {5, 5}, 0.0, 500, 500), Error);
  EXPECT_THROW(visible_region({}, {5, 5}, 0.0, 500, 500), Error);
}

TEST(CellIndex, LinearRoundTrip) {
  const GridSpec g{5, 10};
  for (int i = 0; i < g.cell_count(); ++i) {
    EXPECT_EQ(CellIndex::from_linear(i, g).linear(g), i);
    EXPECT_TRUE(CellIndex::from_linear(i, g).valid(g));
  }
  EXPECT_FALSE((CellIndex{10, 0}).valid(g));
}

}  // namespace
}  // namespace eagers
