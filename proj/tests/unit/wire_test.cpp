#include "eagers/wire.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "eagers/error.hpp"

namespace eagers {
namespace {

using nlohmann::json;

const std::vector<std::uint8_t> kPngish = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A, 1, 2, 3};

TEST(Wire, ExplainBodyShape) {
  const auto body = wire::explain_body({kPngish, "Who signed?", "explain_v1"}, "m1");
  const auto j = json::parse(body);
  EXPECT_EQ(j.size(), 4u);
  EXPECT_EQ(j["question"], "Who signed?");
  EXPECT_EQ(j["prompt_id"], "explain_v1");
  EXPECT_EQ(j["model_id"], "m1");
  EXPECT_EQ(j["image_b64"], "iVBORw0KGgoBAgM=");
  std::string model;
  const auto back = wire::parse_explain_request(body, &model);
  EXPECT_EQ(back.image, kPngish);
  EXPECT_EQ(model, "m1");
}

TEST(Wire, AnswerBodyCarriesOnlyImageQuestionAndIds) {
  const auto j = json::parse(wire::answer_body({kPngish, "q", "answer_v1"}, "m"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"image_b64", "model_id", "prompt_id", "question"}));
}

TEST(Wire, EmbedBodies) {
  const auto text = json::parse(wire::embed_body({Modality::kText, "hi", {}, {"clip"}}));
  EXPECT_EQ(text["modality"], "text");
  EXPECT_EQ(text["text"], "hi");
  EXPECT_FALSE(text.contains("image_b64"));
  const auto image = json::parse(wire::embed_body({Modality::kImage, "", kPngish, {"blip", "align"}}));
  EXPECT_EQ(image["modality"], "image");
  EXPECT_FALSE(image.contains("text"));
  EXPECT_EQ(image["embedder_ids"], json({"blip", "align"}));
  const auto back = wire::parse_embed_request(image.dump());
  EXPECT_EQ(back.image, kPngish);
  EXPECT_EQ(back.embedder_ids.size(), 2u);
}

TEST(Wire, ResponseRoundTrips) {
  EXPECT_EQ(wire::parse_explain_response(wire::explain_response_body("see table")), "see table");
  EXPECT_EQ(wire::parse_answer_response(wire::answer_response_body("42")), "42");
  const std::map<std::string, EmbeddingVector> v = {{"clip", {{0.5, -1.25}}}};
  EXPECT_EQ(wire::parse_embed_response(wire::embed_response_body(v)), v);
  EXPECT_EQ(wire::parse_error(wire::error_body("boom")), "boom");
  EXPECT_EQ(wire::parse_error("plain text"), "plain text");
}

TEST(Wire, MalformedResponsesAreProtocolErrors) {
  for (const char* body : {"", "[]", "{\"answer\": 3}", "{\"x\": \"y\"}"}) {
    try {
      wire::parse_answer_response(body);
      FAIL() << body;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kProtocol);
    }
  }
  EXPECT_THROW(wire::parse_embed_response("{\"vectors\": {\"a\": []}}"), Error);
  EXPECT_THROW(wire::parse_embed_response("{\"vectors\": {\"a\": [\"1\"]}}"), Error);
  EXPECT_THROW(wire::parse_embed_response("{\"vectors\": []}"), Error);
}

TEST(Wire, MalformedRequestsAreRejected) {
  EXPECT_THROW(wire::parse_embed_request(R"({"modality":"text","image_b64":"AA==","embedder_ids":["a"]})"), Error);
  EXPECT_THROW(wire::parse_embed_request(R"({"modality":"audio","text":"x","embedder_ids":["a"]})"), Error);
  EXPECT_THROW(wire::parse_embed_request(R"({"modality":"text","text":"x"})"), Error);
  EXPECT_THROW(wire::parse_answer_request(R"({"question":"q","prompt_id":"p","model_id":"m"})"), Error);
}

}  // namespace
}  // namespace eagers
