#pragma once

// JSON bodies for the inference wire contract. These shapes are shared with
// the model-serving adapter; see schemas/ for the normative JSON Schemas.

#include <string>
#include <string_view>

#include "eagers/backends.hpp"

namespace eagers::wire {

inline constexpr const char* kExplainPath = "/v1/explain";
inline constexpr const char* kAnswerPath = "/v1/answer";
inline constexpr const char* kEmbedPath = "/v1/embed";

std::string explain_body(const ExplainRequest& req, std::string_view model_id);
std::string answer_body(const AnswerRequest& req, std::string_view model_id);
std::string embed_body(const EmbedRequest& req);

// Response parsers; throw Error(kProtocol) on malformed input.
std::string parse_explain_response(std::string_view body);
std::string parse_answer_response(std::string_view body);
std::map<std::string, EmbeddingVector> parse_embed_response(std::string_view body);
/// Extracts {"error": str} from a non-200 body, or returns the raw body.
std::string parse_error(std::string_view body);

// Server-side helpers (used by the conformance stub and the adapter tests).
ExplainRequest parse_explain_request(std::string_view body, std::string* model_id = nullptr);
AnswerRequest parse_answer_request(std::string_view body, std::string* model_id = nullptr);
EmbedRequest parse_embed_request(std::string_view body);
std::string explain_response_body(std::string_view explanation);
std::string answer_response_body(std::string_view answer);
std::string embed_response_body(const std::map<std::string, EmbeddingVector>& vectors);
std::string error_body(std::string_view message);

}  // namespace eagers::wire
