#include "eagers/backends.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "eagers/error.hpp"
#include "eagers/imaging.hpp"
#include "eagers/wire.hpp"

namespace eagers {
namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

void check_image_question(const std::vector<std::uint8_t>& image, const std::string& question,
                          const std::string& prompt_id, std::string_view call) {
  if (blank(question)) {
    throw Error(ErrorKind::kPrecondition, std::string(call) + ": question is empty");
  }
  if (!looks_like_image(image)) {
    throw Error(ErrorKind::kPrecondition, std::string(call) + ": image is not PNG or JPEG data");
  }
  if (prompt_id.empty()) {
    throw Error(ErrorKind::kPrecondition, std::string(call) + ": prompt id is empty");
  }
}

}  // namespace

void BackendConfig::validate() const {
  if (embedder_ids.empty()) throw Error(ErrorKind::kConfig, "at least one embedder id is required");
  if (std::set<std::string>(embedder_ids.begin(), embedder_ids.end()).size() != embedder_ids.size()) {
    throw Error(ErrorKind::kConfig, "embedder ids must be distinct");
  }
  if (retries < 0) throw Error(ErrorKind::kConfig, "retries must be >= 0");
  if (!(timeout_seconds > 0.0)) throw Error(ErrorKind::kConfig, "timeout must be > 0");
  if (max_in_flight < 1) throw Error(ErrorKind::kConfig, "max_in_flight must be >= 1");
}

Backend::Backend(std::vector<std::string> embedder_ids, std::string model_id)
    : embedder_ids_(std::move(embedder_ids)), model_id_(std::move(model_id)) {
  if (embedder_ids_.empty()) throw Error(ErrorKind::kConfig, "at least one embedder id is required");
}

ExplainResponse Backend::explain(const ExplainRequest& req) {
  check_image_question(req.image, req.question, req.prompt_id, "explain");
  auto resp = do_explain(req);
  if (blank(resp.explanation)) {
    throw Error(ErrorKind::kProtocol, "explain: backend returned an empty explanation");
  }
  resp.latency_seconds = std::max(0.0, resp.latency_seconds);
  return resp;
}

AnswerResponse Backend::answer(const AnswerRequest& req) {
  check_image_question(req.image, req.question, req.prompt_id, "answer");
  auto resp = do_answer(req);
  resp.latency_seconds = std::max(0.0, resp.latency_seconds);
  return resp;
}

EmbedResponse Backend::embed(const EmbedRequest& req) {
  if (req.embedder_ids.empty()) {
    throw Error(ErrorKind::kPrecondition, "embed: no embedder ids requested");
  }
  for (const auto& id : req.embedder_ids) {
    if (std::find(embedder_ids_.begin(), embedder_ids_.end(), id) == embedder_ids_.end()) {
      throw Error(ErrorKind::kConfig, "embed: unknown embedder id '" + id + "'");
    }
  }
  if (req.modality == Modality::kText && req.text.empty()) {
    throw Error(ErrorKind::kPrecondition, "embed: text payload is empty");
  }
  if (req.modality == Modality::kImage && !looks_like_image(req.image)) {
    throw Error(ErrorKind::kPrecondition, "embed: image payload is not PNG or JPEG data");
  }

  auto resp = do_embed(req);

  const std::set<std::string> want(req.embedder_ids.begin(), req.embedder_ids.end());
  if (resp.vectors.size() != want.size() ||
      !std::all_of(resp.vectors.begin(), resp.vectors.end(),
                   [&](const auto& kv) { return want.count(kv.first) == 1; })) {
    throw Error(ErrorKind::kProtocol, "embed: response ids do not match the requested embedders");
  }
  std::lock_guard lock(dims_mu_);
  for (const auto& [id, vec] : resp.vectors) {
    if (vec.dim() == 0) throw Error(ErrorKind::kProtocol, "embed: empty vector for '" + id + "'");
    const auto [it, inserted] = dims_.emplace(id, vec.dim());
    if (!inserted && it->second != vec.dim()) {
      throw Error(ErrorKind::kProtocol, "embed: '" + id + "' changed dimension from " +
                                            std::to_string(it->second) + " to " +
                                            std::to_string(vec.dim()));
    }
  }
  resp.latency_seconds = std::max(0.0, resp.latency_seconds);
  return resp;
}

RecordingBackend::RecordingBackend(Backend& inner)
    : Backend(inner.embedder_ids(), inner.model_id()), inner_(inner) {}

void RecordingBackend::record(std::string endpoint, std::string body) {
  std::lock_guard lock(mu_);
  calls_.push_back({std::move(endpoint), std::move(body)});
}

ExplainResponse RecordingBackend::do_explain(const ExplainRequest& req) {
  record("explain", wire::explain_body(req, model_id()));
  return inner_.explain(req);
}

AnswerResponse RecordingBackend::do_answer(const AnswerRequest& req) {
  record("answer", wire::answer_body(req, model_id()));
  return inner_.answer(req);
}

EmbedResponse RecordingBackend::do_embed(const EmbedRequest& req) {
  record("embed", wire::embed_body(req));
  return inner_.embed(req);
}

std::vector<RecordedCall> RecordingBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t RecordingBackend::count(const std::string& endpoint) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(
      calls_.begin(), calls_.end(), [&](const RecordedCall& c) { return c.endpoint == endpoint; }));
}

std::size_t RecordingBackend::total() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

void RecordingBackend::clear() {
  std::lock_guard lock(mu_);
  calls_.clear();
}

}  // namespace eagers
