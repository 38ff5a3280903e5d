#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eagers/geometry.hpp"

namespace eagers {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Vectors produced by one embedder for a question: the explanation plus one
/// vector per grid cell, in row-major cell order.
struct EmbedderVectors {
  std::string embedder_id;
  EmbeddingVector explanation;
  std::vector<EmbeddingVector> cells;
};

// scores[e][c]: cosine between embedder e's explanation vector and cell c.
struct SimilarityMatrix {
  std::vector<std::string> embedder_ids;
  std::vector<std::vector<double>> scores;

  std::size_t embedder_count() const noexcept { return scores.size(); }
  std::size_t cell_count() const noexcept { return scores.empty() ? 0 : scores.front().size(); }
};

struct SelectionResult {
  // Ordered by votes desc, mean score desc, linear index asc.
  std::vector<CellIndex> selected;
  // Indexed by linear cell index.
  std::vector<int> votes;
  std::vector<double> mean_scores;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

SimilarityMatrix score_cells(const std::vector<EmbedderVectors>& embeddings, std::size_t cell_count);

/// Majority fusion of per-embedder rankings.
///
/// Each embedder votes for its own top-k cells (k = selection_count(grid),
/// ties inside an embedder go to the lower linear index). Cells are then
/// ordered by vote count, then by the mean cosine across embedders, then by
/// linear index, and the first k are selected.
SelectionResult fuse_majority(const SimilarityMatrix& sim, const GridSpec& grid);

}  // namespace eagers
