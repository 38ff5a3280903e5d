#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "eagers/config.hpp"
#include "eagers/ranking.hpp"

namespace eagers {

enum class Stage { kExplanation, kEmbeddings, kSelection, kAnswer };

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view text);

struct StageArtifact {
  std::string question_id;
  Stage stage = Stage::kExplanation;
  std::string payload;
  double latency_seconds = 0.0;

  friend bool operator==(const StageArtifact&, const StageArtifact&) = default;
};

/// Writes `contents` to `path` via a temp file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Writes `contents` to `path` only if nothing is there yet. Concurrent callers
/// race on a hard link, so exactly one wins; returns true for the winner.
bool write_file_once(const std::filesystem::path& path, std::string_view contents);

/// Per-question stage cache rooted at <out>/runs/<config_hash>/.
///
/// Layout: <run_dir>/<question_id>/<stage>.json. Every entry carries the
/// config hash and a digest of its payload; entries that fail to parse or
/// verify are treated as misses. Stages form a prefix chain: eagers runs
/// store explanation -> embeddings -> selection -> answer, baseline runs only
/// store answer.
class RunStore {
 public:
  RunStore(std::filesystem::path run_dir, std::string config_hash, RunMode mode);

  std::optional<StageArtifact> get(std::string_view question_id, Stage stage) const;
  /// Returns true if this call wrote the entry, false if one already existed.
  bool put(const StageArtifact& artifact);

  const std::filesystem::path& run_dir() const noexcept { return run_dir_; }
  const std::string& config_hash() const noexcept { return config_hash_; }
  std::filesystem::path question_dir(std::string_view question_id) const;
  std::filesystem::path stage_path(std::string_view question_id, Stage stage) const;

 private:
  std::filesystem::path run_dir_;
  std::string config_hash_;
  RunMode mode_;
};

/// Content cache for single embedding vectors, keyed by a scope digest (the
/// config fields that change embeddings), question, embedder and item
/// ("explanation-<digest>" or "cell-<n>"). Margins do not enter the scope, so
/// runs that differ only in margin share entries.
///
/// Layout: <root>/<scope>/<question_id>/<embedder>/<item>.json
class EmbeddingStore {
 public:
  struct Entry {
    EmbeddingVector vector;
    double latency_seconds = 0.0;
  };

  explicit EmbeddingStore(std::filesystem::path root);

  std::optional<Entry> get(std::string_view scope, std::string_view question_id,
                           std::string_view embedder, std::string_view item) const;
  bool put(std::string_view scope, std::string_view question_id, std::string_view embedder,
           std::string_view item, const Entry& entry);

  /// Scope digest: grid, max_side, model_id and explain prompt.
  static std::string scope_for(const PipelineConfig& cfg);

 private:
  std::filesystem::path path_for(std::string_view scope, std::string_view question_id,
                                 std::string_view embedder, std::string_view item) const;
  std::filesystem::path root_;
};

// Payload codecs for the stages.
std::string embeddings_payload(const std::vector<EmbedderVectors>& embeddings);
std::vector<EmbedderVectors> parse_embeddings_payload(std::string_view payload);
std::string selection_payload(const SelectionResult& selection, const GridSpec& grid);
SelectionResult parse_selection_payload(std::string_view payload);

}  // namespace eagers
