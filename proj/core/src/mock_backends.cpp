#include "eagers/backends.hpp"

#include <string>

#include "eagers/codec.hpp"
#include "eagers/imaging.hpp"
#include "eagers/synth.hpp"

namespace eagers {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [-1, 1).
double next_unit(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
}

EmbeddingVector hashed_vector(std::uint64_t seed, std::size_t dim, double scale) {
  EmbeddingVector v;
  v.values.resize(dim);
  std::uint64_t state = seed;
  for (auto& x : v.values) x = scale * next_unit(state);
  return v;
}

std::uint64_t payload_hash(const EmbedRequest& req, std::uint64_t seed) {
  if (req.modality == Modality::kText) return fnv1a64(req.text, fnv1a64("text", seed));
  const std::string_view bytes(reinterpret_cast<const char*>(req.image.data()), req.image.size());
  return fnv1a64(bytes, fnv1a64("image", seed));
}

std::uint64_t image_hash(const std::vector<std::uint8_t>& image, std::string_view question) {
  const std::string_view bytes(reinterpret_cast<const char*>(image.data()), image.size());
  return fnv1a64(question, fnv1a64(bytes));
}

// Deterministic stand-in for inference time: base + spread * u, u in [0, 1).
double simulated_latency(std::uint64_t h, double base, double spread) {
  return base + spread * static_cast<double>(h % 1000) / 1000.0;
}

}  // namespace

std::size_t FixtureBackend::dim_for(const std::string& embedder_id) {
  if (embedder_id == "blip") return 32;
  if (embedder_id == "clip") return 24;
  if (embedder_id == "align") return 40;
  return 16 + fnv1a64(embedder_id) % 17;
}

FixtureBackend::FixtureBackend(std::vector<std::string> embedder_ids, std::uint64_t seed)
    : Backend(std::move(embedder_ids), "fixture"), seed_(seed) {}

void FixtureBackend::set_explanation(const std::string& question, std::string explanation) {
  explanations_[question] = std::move(explanation);
}

void FixtureBackend::set_answer(const std::string& question, std::string answer) {
  answers_[question] = std::move(answer);
}

ExplainResponse FixtureBackend::do_explain(const ExplainRequest& req) {
  const auto it = explanations_.find(req.question);
  return {it != explanations_.end() ? it->second
                                     : "The answer is written in the part of the page the question refers to.",
          simulated_latency(image_hash(req.image, req.question), 1.0, 1.0)};
}

AnswerResponse FixtureBackend::do_answer(const AnswerRequest& req) {
  const auto it = answers_.find(req.question);
  return {it != answers_.end() ? it->second : "unknown",
          simulated_latency(image_hash(req.image, req.question) ^ 0x5bd1e995, 0.5, 1.0)};
}

EmbedResponse FixtureBackend::do_embed(const EmbedRequest& req) {
  EmbedResponse resp;
  const std::uint64_t h = payload_hash(req, seed_);
  for (const auto& id : req.embedder_ids) {
    resp.vectors.emplace(id, hashed_vector(fnv1a64(id, h), dim_for(id), 1.0));
  }
  resp.latency_seconds = simulated_latency(h, 0.01, 0.02);
  return resp;
}

PlantedBackend::PlantedBackend(PlantedOptions options, std::vector<std::string> embedder_ids)
    : Backend(std::move(embedder_ids), "planted"), options_(std::move(options)) {}

ExplainResponse PlantedBackend::do_explain(const ExplainRequest& req) {
  return {kExplanation, simulated_latency(image_hash(req.image, req.question), 1.0, 1.0)};
}

AnswerResponse PlantedBackend::do_answer(const AnswerRequest& req) {
  const ImageBuffer img = decode_image(req.image);
  const double latency = simulated_latency(image_hash(req.image, req.question) ^ 0x5bd1e995, 0.5, 1.0);
  if (synth::count_marker_pixels(img) < static_cast<std::size_t>(options_.min_marker_pixels)) {
    return {kUnknownAnswer, latency};
  }
  const auto it = options_.answers.find(req.question);
  return {it != options_.answers.end() ? it->second : kUnknownAnswer, latency};
}

EmbedResponse PlantedBackend::do_embed(const EmbedRequest& req) {
  EmbedResponse resp;
  const std::uint64_t h = payload_hash(req, options_.seed);
  double axis = 0.0;
  double noise = 0.0;
  if (req.modality == Modality::kText) {
    axis = req.text.find("marker") != std::string::npos ? 1.0 : 0.0;
    noise = 0.05;
  } else {
    const ImageBuffer img = decode_image(req.image);
    axis = options_.adversarial
               ? 10.0 * (synth::decoy_fraction(img) - synth::marker_fraction(img))
               : 10.0 * synth::marker_fraction(img);
    noise = 0.02;
  }
  for (const auto& id : req.embedder_ids) {
    auto v = hashed_vector(fnv1a64(id, h), FixtureBackend::dim_for(id), noise);
    v.values[0] = axis;
    resp.vectors.emplace(id, std::move(v));
  }
  resp.latency_seconds = simulated_latency(h, 0.01, 0.02);
  return resp;
}

}  // namespace eagers
