#include "eagers/wire.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"

namespace eagers::wire {
namespace {

using nlohmann::json;

json parse_object(std::string_view body, std::string_view what) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorKind::kProtocol, std::string(what) + ": body is not a JSON object");
  }
  return j;
}

std::string require_string(const json& j, const char* key, std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorKind::kProtocol, std::string(what) + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

std::string_view modality_name(Modality m) { return m == Modality::kText ? "text" : "image"; }

json image_request(const std::vector<std::uint8_t>& image, const std::string& question,
                   const std::string& prompt_id, std::string_view model_id) {
  return json{{"image_b64", base64_encode(image)},
              {"question", question},
              {"prompt_id", prompt_id},
              {"model_id", std::string(model_id)}};
}

template <typename Req>
Req parse_image_request(std::string_view body, std::string* model_id, std::string_view what) {
  const json j = parse_object(body, what);
  Req req;
  req.image = base64_decode(require_string(j, "image_b64", what));
  req.question = require_string(j, "question", what);
  req.prompt_id = require_string(j, "prompt_id", what);
  const std::string model = require_string(j, "model_id", what);
  if (model_id != nullptr) *model_id = model;
  return req;
}

}  // namespace

std::string explain_body(const ExplainRequest& req, std::string_view model_id) {
  return image_request(req.image, req.question, req.prompt_id, model_id).dump();
}

std::string answer_body(const AnswerRequest& req, std::string_view model_id) {
  return image_request(req.image, req.question, req.prompt_id, model_id).dump();
}

std::string embed_body(const EmbedRequest& req) {
  json j{{"modality", modality_name(req.modality)}, {"embedder_ids", req.embedder_ids}};
  if (req.modality == Modality::kText) {
    j["text"] = req.text;
  } else {
    j["image_b64"] = base64_encode(req.image);
  }
  return j.dump();
}

std::string parse_explain_response(std::string_view body) {
  return require_string(parse_object(body, "explain response"), "explanation", "explain response");
}

std::string parse_answer_response(std::string_view body) {
  return require_string(parse_object(body, "answer response"), "answer", "answer response");
}

std::map<std::string, EmbeddingVector> parse_embed_response(std::string_view body) {
  const json j = parse_object(body, "embed response");
  const auto it = j.find("vectors");
  if (it == j.end() || !it->is_object()) {
    throw Error(ErrorKind::kProtocol, "embed response: missing object field 'vectors'");
  }
  std::map<std::string, EmbeddingVector> out;
  for (const auto& [id, arr] : it->items()) {
    if (!arr.is_array() || arr.empty()) {
      throw Error(ErrorKind::kProtocol, "embed response: vector for '" + id + "' is not a non-empty array");
    }
    EmbeddingVector v;
    v.values.reserve(arr.size());
    for (const auto& x : arr) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw Error(ErrorKind::kProtocol, "embed response: non-numeric entry for '" + id + "'");
      }
      v.values.push_back(x.get<double>());
    }
    out.emplace(id, std::move(v));
  }
  return out;
}

std::string parse_error(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_object() && j.contains("error") && j["error"].is_string()) {
    return j["error"].get<std::string>();
  }
  return std::string(body);
}

ExplainRequest parse_explain_request(std::string_view body, std::string* model_id) {
  return parse_image_request<ExplainRequest>(body, model_id, "explain request");
}

AnswerRequest parse_answer_request(std::string_view body, std::string* model_id) {
  return parse_image_request<AnswerRequest>(body, model_id, "answer request");
}

EmbedRequest parse_embed_request(std::string_view body) {
  const json j = parse_object(body, "embed request");
  EmbedRequest req;
  const std::string modality = require_string(j, "modality", "embed request");
  const bool has_text = j.contains("text");
  const bool has_image = j.contains("image_b64");
  if (modality == "text") {
    if (!has_text || has_image) {
      throw Error(ErrorKind::kProtocol, "embed request: text modality needs exactly 'text'");
    }
    req.modality = Modality::kText;
    req.text = require_string(j, "text", "embed request");
  } else if (modality == "image") {
    if (!has_image || has_text) {
      throw Error(ErrorKind::kProtocol, "embed request: image modality needs exactly 'image_b64'");
    }
    req.modality = Modality::kImage;
    req.image = base64_decode(require_string(j, "image_b64", "embed request"));
  } else {
    throw Error(ErrorKind::kProtocol, "embed request: unknown modality '" + modality + "'");
  }
  const auto ids = j.find("embedder_ids");
  if (ids == j.end() || !ids->is_array()) {
    throw Error(ErrorKind::kProtocol, "embed request: missing array field 'embedder_ids'");
  }
  for (const auto& id : *ids) {
    if (!id.is_string()) throw Error(ErrorKind::kProtocol, "embed request: embedder id is not a string");
    req.embedder_ids.push_back(id.get<std::string>());
  }
  return req;
}

std::string explain_response_body(std::string_view explanation) {
  return json{{"explanation", std::string(explanation)}}.dump();
}

std::string answer_response_body(std::string_view answer) {
  return json{{"answer", std::string(answer)}}.dump();
}

std::string embed_response_body(const std::map<std::string, EmbeddingVector>& vectors) {
  json v = json::object();
  for (const auto& [id, vec] : vectors) v[id] = vec.values;
  return json{{"vectors", v}}.dump();
}

std::string error_body(std::string_view message) {
  return json{{"error", std::string(message)}}.dump();
}

}  // namespace eagers::wire
