#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "eagers/ranking.hpp"

namespace eagers {

inline const std::vector<std::string> kDefaultEmbedderIds = {"blip", "clip", "align"};
inline constexpr const char* kDefaultModelId = "qwen2.5-vl-3b";
inline constexpr const char* kDefaultExplainPrompt = "explain_v1";
inline constexpr const char* kDefaultAnswerPrompt = "answer_v1";

struct BackendConfig {
  std::string base_url;
  double timeout_seconds = 120.0;
  int retries = 2;
  std::vector<std::string> embedder_ids = kDefaultEmbedderIds;
  std::string model_id = kDefaultModelId;
  int max_in_flight = 4;

  void validate() const;
};

// Image payloads are raw encoded bytes (PNG); base64 happens on the wire.
struct ExplainRequest {
  std::vector<std::uint8_t> image;
  std::string question;
  std::string prompt_id;
};

struct ExplainResponse {
  std::string explanation;
  double latency_seconds = 0.0;
};

// Deliberately has no field that could carry an explanation: the answering
// call only ever sees the masked image and the question.
struct AnswerRequest {
  std::vector<std::uint8_t> image;
  std::string question;
  std::string prompt_id;
};

struct AnswerResponse {
  std::string answer;
  double latency_seconds = 0.0;
};

enum class Modality { kText, kImage };

struct EmbedRequest {
  Modality modality = Modality::kText;
  std::string text;                  // kText
  std::vector<std::uint8_t> image;   // kImage
  std::vector<std::string> embedder_ids;
};

struct EmbedResponse {
  std::map<std::string, EmbeddingVector> vectors;
  double latency_seconds = 0.0;
};

/// Inference boundary. The public calls check preconditions before any work is
/// dispatched and validate responses (requested ids only, stable dims per
/// embedder); implementations supply the do_* hooks.
class Backend {
 public:
  Backend(std::vector<std::string> embedder_ids, std::string model_id);
  virtual ~Backend() = default;

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  ExplainResponse explain(const ExplainRequest& req);
  AnswerResponse answer(const AnswerRequest& req);
  EmbedResponse embed(const EmbedRequest& req);

  const std::vector<std::string>& embedder_ids() const noexcept { return embedder_ids_; }
  const std::string& model_id() const noexcept { return model_id_; }

 protected:
  virtual ExplainResponse do_explain(const ExplainRequest& req) = 0;
  virtual AnswerResponse do_answer(const AnswerRequest& req) = 0;
  virtual EmbedResponse do_embed(const EmbedRequest& req) = 0;

 private:
  std::vector<std::string> embedder_ids_;
  std::string model_id_;
  std::mutex dims_mu_;
  std::map<std::string, std::size_t> dims_;
};

/// Client for the JSON-over-HTTP wire contract (/v1/explain, /v1/answer,
/// /v1/embed). Transport failures and 5xx responses are retried up to
/// config.retries times; latency is measured client-side.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);
  ~HttpBackend() override;

  /// True if anything answers HTTP at base_url.
  bool reachable();

 protected:
  ExplainResponse do_explain(const ExplainRequest& req) override;
  AnswerResponse do_answer(const AnswerRequest& req) override;
  EmbedResponse do_embed(const EmbedRequest& req) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Deterministic offline backend. Explanations and answers come from
/// per-question fixture maps (with a generic fallback); embeddings are
/// hash-seeded pseudo-random vectors, so identical payloads give identical
/// vectors.
class FixtureBackend final : public Backend {
 public:
  explicit FixtureBackend(std::vector<std::string> embedder_ids = kDefaultEmbedderIds,
                          std::uint64_t seed = 0);

  void set_explanation(const std::string& question, std::string explanation);
  void set_answer(const std::string& question, std::string answer);

  /// Fixed dimensionality per embedder id.
  static std::size_t dim_for(const std::string& embedder_id);

 protected:
  ExplainResponse do_explain(const ExplainRequest& req) override;
  AnswerResponse do_answer(const AnswerRequest& req) override;
  EmbedResponse do_embed(const EmbedRequest& req) override;

 private:
  std::uint64_t seed_;
  std::map<std::string, std::string> explanations_;
  std::map<std::string, std::string> answers_;
};

struct PlantedOptions {
  // Map question -> answer returned when the evidence marker is visible.
  std::map<std::string, std::string> answers;
  // Point the image embedders at the decoy block instead of the marker.
  bool adversarial = false;
  std::uint64_t seed = 0;
  // Minimum visible marker pixels for the answer mock to "read" the answer.
  int min_marker_pixels = 100;
};

/// Planted-evidence mock built around synthetic documents that carry a red
/// evidence marker and a blue decoy block (see synth.hpp).
///
/// * explain returns a fixed explanation that talks about the marker.
/// * embed maps that explanation onto axis 0 and maps an image crop onto
///   axis 0 in proportion to how much of it is covered by the target colour
///   (red, or blue when adversarial; in adversarial mode the red marker is
///   pushed onto the negative axis), plus small hash-seeded noise elsewhere.
/// * answer returns the stored answer only when enough red marker pixels are
///   visible in the request image, and "unknown" otherwise.
class PlantedBackend final : public Backend {
 public:
  explicit PlantedBackend(PlantedOptions options,
                          std::vector<std::string> embedder_ids = kDefaultEmbedderIds);

  static constexpr const char* kExplanation =
      "Find the red marker box, the value next to it is what the question wants.";
  static constexpr const char* kUnknownAnswer = "unknown";

 protected:
  ExplainResponse do_explain(const ExplainRequest& req) override;
  AnswerResponse do_answer(const AnswerRequest& req) override;
  EmbedResponse do_embed(const EmbedRequest& req) override;

 private:
  PlantedOptions options_;
};

struct RecordedCall {
  std::string endpoint;  // "explain" | "answer" | "embed"
  std::string body;      // wire JSON body
};

/// Pass-through decorator that records the serialized wire body of every
/// call and counts calls per endpoint.
class RecordingBackend final : public Backend {
 public:
  explicit RecordingBackend(Backend& inner);

  std::vector<RecordedCall> calls() const;
  std::size_t count(const std::string& endpoint) const;
  std::size_t total() const;
  void clear();

 protected:
  ExplainResponse do_explain(const ExplainRequest& req) override;
  AnswerResponse do_answer(const AnswerRequest& req) override;
  EmbedResponse do_embed(const EmbedRequest& req) override;

 private:
  void record(std::string endpoint, std::string body);

  Backend& inner_;
  mutable std::mutex mu_;
  std::vector<RecordedCall> calls_;
};

}  // namespace eagers
