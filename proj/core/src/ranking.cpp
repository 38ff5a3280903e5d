#include "eagers/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eagers/error.hpp"

namespace eagers {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim() || a.dim() == 0) {
    throw Error(ErrorKind::kShape, "cosine over vectors of dim " + std::to_string(a.dim()) +
                                       " and " + std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (!(na > 0.0) || !(nb > 0.0) || !std::isfinite(na) || !std::isfinite(nb)) {
    throw Error(ErrorKind::kDegenerateVector, "cosine of a zero-norm or non-finite vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

SimilarityMatrix score_cells(const std::vector<EmbedderVectors>& embeddings, std::size_t cell_count) {
  if (embeddings.empty()) {
    throw Error(ErrorKind::kIncompleteEmbedding, "no embedders supplied");
  }
  SimilarityMatrix sim;
  sim.embedder_ids.reserve(embeddings.size());
  sim.scores.reserve(embeddings.size());
  for (const auto& e : embeddings) {
    if (e.cells.size() != cell_count) {
      throw Error(ErrorKind::kIncompleteEmbedding,
                  "embedder '" + e.embedder_id + "' has " + std::to_string(e.cells.size()) +
                      " cell vectors, expected " + std::to_string(cell_count));
    }
    std::vector<double> row;
    row.reserve(cell_count);
    for (const auto& cell : e.cells) row.push_back(cosine(e.explanation, cell));
    sim.embedder_ids.push_back(e.embedder_id);
    sim.scores.push_back(std::move(row));
  }
  return sim;
}

SelectionResult fuse_majority(const SimilarityMatrix& sim, const GridSpec& grid) {
  const int k = selection_count(grid);
  const auto n = static_cast<std::size_t>(grid.cell_count());
  if (sim.embedder_count() == 0) {
    throw Error(ErrorKind::kShape, "similarity matrix has no embedders");
  }
  for (const auto& row : sim.scores) {
    if (row.size() != n) {
      throw Error(ErrorKind::kShape, "similarity row has " + std::to_string(row.size()) +
                                         " cells, grid has " + std::to_string(n));
    }
    for (double s : row) {
      if (!std::isfinite(s)) throw Error(ErrorKind::kShape, "non-finite similarity score");
    }
  }

  SelectionResult out;
  out.votes.assign(n, 0);
  out.mean_scores.assign(n, 0.0);

  std::vector<int> order(n);
  for (const auto& row : sim.scores) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return a < b;
    });
    for (int i = 0; i < k; ++i) ++out.votes[static_cast<std::size_t>(order[i])];
  }

  const double e = static_cast<double>(sim.embedder_count());
  for (std::size_t c = 0; c < n; ++c) {
    double sum = 0.0;
    for (const auto& row : sim.scores) sum += row[c];
    out.mean_scores[c] = sum / e;
  }

  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    if (out.votes[ua] != out.votes[ub]) return out.votes[ua] > out.votes[ub];
    if (out.mean_scores[ua] != out.mean_scores[ub]) return out.mean_scores[ua] > out.mean_scores[ub];
    return a < b;
  });
  out.selected.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.selected.push_back(CellIndex::from_linear(order[i], grid));
  return out;
}

}  // namespace eagers
