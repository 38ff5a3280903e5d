#include "eagers/ranking.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "eagers/error.hpp"
#include "oracles.hpp"

namespace eagers {
namespace {

SimilarityMatrix matrix(std::vector<std::vector<double>> scores) {
  SimilarityMatrix m;
  for (std::size_t e = 0; e < scores.size(); ++e) m.embedder_ids.push_back("e" + std::to_string(e));
  m.scores = std::move(scores);
  return m;
}

std::vector<int> linear(const SelectionResult& r, const GridSpec& g) {
  std::vector<int> out;
  for (const auto& c : r.selected) out.push_back(c.linear(g));
  return out;
}

TEST(Cosine, BasicValues) {
  EXPECT_DOUBLE_EQ(cosine({{1, 0}}, {{1, 0}}), 1.0);
  EXPECT_DOUBLE_EQ(cosine({{1, 0}}, {{0, 3}}), 0.0);
  EXPECT_DOUBLE_EQ(cosine({{1, 1}}, {{-2, -2}}), -1.0);
  EXPECT_DOUBLE_EQ(cosine({{1, 2, 3}}, {{1, 2, 3}}), 1.0);
  EXPECT_NEAR(cosine({{1, 1}}, {{1, 0}}), 0.7071, 1e-4);
  EXPECT_NEAR(cosine({{1, 2, 3}}, {{4, 5, 6}}), 32.0 / std::sqrt(14.0 * 77.0), 1e-12);
}

TEST(Cosine, ErrorsOnShapeAndZero) {
  try {
    cosine({{1, 2}}, {{1, 2, 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
  try {
    cosine({{0, 0}}, {{1, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateVector);
  }
}

TEST(Cosine, StaysInRange) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1e3);
  for (int t = 0; t < 1000; ++t) {
    EmbeddingVector a, b;
    for (int i = 0; i < 7; ++i) {
      a.values.push_back(n(rng));
      b.values.push_back(t % 5 == 0 ? a.values.back() * 3.0 : n(rng));
    }
    const double c = cosine(a, b);
    ASSERT_GE(c, -1.0);
    ASSERT_LE(c, 1.0);
  }
}

TEST(ScoreCells, BuildsMatrixAndChecksCompleteness) {
  EmbedderVectors e{"blip", {{1, 0}}, {{{1, 0}}, {{0, 1}}, {{1, 1}}}};
  const auto m = score_cells({e}, 3);
  ASSERT_EQ(m.embedder_count(), 1u);
  ASSERT_EQ(m.cell_count(), 3u);
  EXPECT_DOUBLE_EQ(m.scores[0][0], 1.0);
  EXPECT_DOUBLE_EQ(m.scores[0][1], 0.0);
  EXPECT_EQ(m.embedder_ids[0], "blip");
  try {
    score_cells({e}, 4);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kIncompleteEmbedding);
  }
  EXPECT_THROW(score_cells({}, 3), Error);
}

TEST(ScoreCells, OrthogonalAndParallel) {
  EmbedderVectors a{"a", {{1, 0}}, {{{2, 0}}, {{0, 5}}}};
  EmbedderVectors b{"b", {{0, 1}}, {{{3, 0}}, {{0, 1}}}};
  const auto m = score_cells({a, b}, 2);
  EXPECT_EQ(m.scores, (std::vector<std::vector<double>>{{1, 0}, {0, 1}}));
}

TEST(ScoreCells, MatchesNaiveLoop) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0, 1);
  std::vector<EmbedderVectors> emb;
  for (int e = 0; e < 3; ++e) {
    EmbedderVectors v{"e" + std::to_string(e), {}, {}};
    const int dim = 4 + e;
    for (int i = 0; i < dim; ++i) v.explanation.values.push_back(n(rng));
    for (int c = 0; c < 6; ++c) {
      EmbeddingVector x;
      for (int i = 0; i < dim; ++i) x.values.push_back(n(rng));
      v.cells.push_back(x);
    }
    emb.push_back(v);
  }
  const auto m = score_cells(emb, 6);
  for (int e = 0; e < 3; ++e)
    for (int c = 0; c < 6; ++c) {
      double dot = 0, na = 0, nb = 0;
      const auto& a = emb[e].explanation.values;
      const auto& b = emb[e].cells[c].values;
      for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
      EXPECT_NEAR(m.scores[e][c], dot / std::sqrt(na * nb), 1e-9);
    }
}

TEST(Fuse, WorkedThreeEmbedderExample) {
  const GridSpec g{4, 1};
  const auto r = fuse_majority(matrix({{.9, .8, .1, .2}, {.9, .1, .8, .2}, {.1, .9, .8, .2}}), g);
  EXPECT_EQ(r.votes, (std::vector<int>{2, 2, 2, 0}));
  EXPECT_NEAR(r.mean_scores[0], 0.63333, 1e-4);
  EXPECT_NEAR(r.mean_scores[1], 0.6, 1e-9);
  EXPECT_NEAR(r.mean_scores[2], 0.56667, 1e-4);
  EXPECT_EQ(linear(r, g), (std::vector<int>{0, 1}));
}

TEST(Fuse, SingleEmbedderIsPlainTopK) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 50; ++t) {
    const GridSpec g{5, 5};
    const auto s = testing::random_scores(rng, 1, 25);
    std::vector<int> order(25);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[0][a] > s[0][b]; });
    order.resize(8);
    EXPECT_EQ(linear(fuse_majority(matrix(s), g), g), order);
  }
}

TEST(Fuse, UnanimousTopKIsSelected) {
  // Three embedders agree that cells 0..7 of a 5x5 grid are the best.
  const GridSpec g{5, 5};
  std::vector<std::vector<double>> s(3, std::vector<double>(25));
  for (int e = 0; e < 3; ++e)
    for (int c = 0; c < 25; ++c) s[e][c] = (c < 8 ? 0.9 : 0.1) - 0.001 * c * (e + 1);
  const auto r = fuse_majority(matrix(s), g);
  auto sel = linear(r, g);
  std::sort(sel.begin(), sel.end());
  EXPECT_EQ(sel, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
  for (int c = 0; c < 8; ++c) EXPECT_EQ(r.votes[c], 3);
  for (int c = 8; c < 25; ++c) EXPECT_EQ(r.votes[c], 0);
}

TEST(Fuse, VotesBeatMeanScore) {
  // 1x4 grid, k = 2. Cell 2 has by far the best mean but only one vote;
  // cells 0 and 1 tie on votes and are ordered by mean.
  const GridSpec g{4, 1};
  const auto r = fuse_majority(matrix({{0.9, 0.8, 0.7, 0.0},
                                       {0.9, 0.8, 0.7, 0.0},
                                       {-1.0, -0.5, 1.0, 0.99}}),
                               g);
  EXPECT_EQ(r.votes, (std::vector<int>{2, 2, 1, 1}));
  EXPECT_GT(r.mean_scores[2], r.mean_scores[1]);
  EXPECT_GT(r.mean_scores[1], r.mean_scores[0]);
  EXPECT_EQ(linear(r, g), (std::vector<int>{1, 0}));
}

TEST(Fuse, ExactTiesGoToLowerIndex) {
  const GridSpec g{5, 2};  // k = 3
  const auto r = fuse_majority(matrix({std::vector<double>(10, 0.25)}), g);
  EXPECT_EQ(linear(r, g), (std::vector<int>{0, 1, 2}));
}

TEST(Fuse, RejectsBadShapes) {
  EXPECT_THROW(fuse_majority(matrix({{0.1, 0.2}}), {3, 1}), Error);
  EXPECT_THROW(fuse_majority(matrix({}), {1, 1}), Error);
  EXPECT_THROW(fuse_majority(matrix({{0.1, std::nan("")}}), {2, 1}), Error);
}

TEST(FuseProperty, CardinalityAndDistinctness) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const GridSpec g{std::uniform_int_distribution<int>(1, 10)(rng), std::uniform_int_distribution<int>(1, 10)(rng)};
    const int e = std::uniform_int_distribution<int>(1, 4)(rng);
    const auto r = fuse_majority(matrix(testing::random_scores(rng, e, g.cell_count())), g);
    ASSERT_EQ(static_cast<int>(r.selected.size()), selection_count(g));
    auto sel = linear(r, g);
    std::sort(sel.begin(), sel.end());
    ASSERT_EQ(std::adjacent_find(sel.begin(), sel.end()), sel.end());
    ASSERT_EQ(std::accumulate(r.votes.begin(), r.votes.end(), 0), e * selection_count(g));
  }
}

TEST(FuseProperty, InvariantUnderPositiveScalingAndEmbedderOrder) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 200; ++t) {
    const GridSpec g{5, 5};
    auto s = testing::random_scores(rng, 3, 25);
    const auto base = fuse_majority(matrix(s), g);
    auto scaled = s;
    for (auto& row : scaled)
      for (auto& v : row) v *= 0.5;  // exact in binary floating point
    EXPECT_EQ(linear(fuse_majority(matrix(scaled), g), g), linear(base, g));
    auto perm = s;
    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    EXPECT_EQ(linear(fuse_majority(matrix(perm), g), g), linear(base, g));
  }
}

TEST(FuseProperty, Deterministic) {
  std::mt19937_64 rng(23);
  const auto s = testing::random_scores(rng, 3, 50);
  EXPECT_EQ(fuse_majority(matrix(s), {5, 10}), fuse_majority(matrix(s), {5, 10}));
}

TEST(FuseProperty, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 300; ++t) {
    const int cells = std::uniform_int_distribution<int>(1, 8)(rng);
    const int e = std::uniform_int_distribution<int>(1, 3)(rng);
    const GridSpec g{cells, 1};
    const auto s = testing::random_scores(rng, e, cells);
    const auto want = testing::fusion_oracle(s, selection_count(g));
    ASSERT_FALSE(want.selected.empty());
    const auto got = fuse_majority(matrix(s), g);
    ASSERT_EQ(linear(got, g), want.selected);
    ASSERT_EQ(got.votes, want.votes);
  }
}

}  // namespace
}  // namespace eagers
