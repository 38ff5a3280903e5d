#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eagers/backends.hpp"
#include "eagers/config.hpp"
#include "eagers/dataset.hpp"
#include "eagers/metrics.hpp"
#include "eagers/ranking.hpp"
#include "eagers/report.hpp"
#include "eagers/run_store.hpp"

namespace eagers {

struct StageLatencies {
  double explanation = 0.0;
  double embeddings = 0.0;
  double answer = 0.0;

  friend bool operator==(const StageLatencies&, const StageLatencies&) = default;
};

struct QuestionOutcome {
  std::string question_id;
  std::string image_path;
  bool failed = false;
  std::string failed_stage;  // "load", "explanation", "embeddings", "selection", "mask", "answer"
  std::string error;
  std::string explanation;
  std::optional<SelectionResult> selection;
  std::string answer;
  AnswerJudgment judgment;
  StageLatencies latencies;
  // Sum of stage latencies; stages within a question run strictly in sequence.
  double total_seconds = 0.0;

  friend bool operator==(const QuestionOutcome&, const QuestionOutcome&) = default;
};

std::string outcome_to_json(const QuestionOutcome& outcome);
QuestionOutcome outcome_from_json(std::string_view json);

struct SplitResult {
  EvalReport report;
  std::vector<QuestionOutcome> outcomes;
  std::filesystem::path run_dir;
};

/// Runs the five-step flow for each question: resize, explain, partition and
/// embed, fuse, mask, and re-query with the masked image. Baseline mode skips
/// straight to answering on the resized, unmasked image.
///
/// Every intermediate is persisted under <out>/runs/<config_hash>/ and reused
/// on later runs with the same config, so a warm re-run issues no backend
/// calls. Questions run concurrently up to cfg.concurrency; the stages of one
/// question are sequential.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, Backend& backend, std::filesystem::path out_dir);

  QuestionOutcome run_question(const QARecord& record);
  SplitResult run_split(const Dataset& dataset);

  const std::filesystem::path& run_dir() const noexcept { return store_.run_dir(); }
  const PipelineConfig& config() const noexcept { return cfg_; }

 private:
  QuestionOutcome run_eagers(const QARecord& record);
  QuestionOutcome run_baseline(const QARecord& record);
  std::vector<EmbedderVectors> embed_cells(const QARecord& record, const ImageBuffer& image,
                                           const std::vector<GridCell>& cells,
                                           const std::string& explanation, double& latency);

  PipelineConfig cfg_;
  Backend& backend_;
  std::filesystem::path out_dir_;
  std::string hash_;
  RunStore store_;
  EmbeddingStore embedding_store_;
};

/// Rebuilds the masked image for an eagers outcome from its source image,
/// the stored selection and the run config.
ImageBuffer masked_image_for(const QuestionOutcome& outcome, const PipelineConfig& cfg);

}  // namespace eagers
