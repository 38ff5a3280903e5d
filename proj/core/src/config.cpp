#include "eagers/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <regex>
#include <set>
#include <variant>

#include <nlohmann/json.hpp>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"

namespace eagers {
namespace {

// Minimal TOML reader: bare keys, one [backend] table, strings, integers,
// floats, booleans and single-line arrays. Enough for run configs; anything
// else is a config error.
using Scalar = std::variant<std::string, std::int64_t, double, bool>;
struct Value {
  Scalar scalar;
  std::vector<Scalar> array;
  bool is_array = false;
};

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  std::map<std::string, Value> read() {
    std::map<std::string, Value> out;
    std::string table;
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      if (peek() == '\n') {
        next_line();
        continue;
      }
      if (peek() == '#') {
        skip_comment();
        continue;
      }
      if (peek() == '[') {
        ++pos_;
        table = key();
        skip_blank();
        expect(']');
        end_of_line();
        continue;
      }
      std::string k = key();
      skip_blank();
      expect('=');
      skip_blank();
      Value v = value();
      end_of_line();
      const std::string full = table.empty() ? k : table + "." + k;
      if (!out.emplace(full, std::move(v)).second) fail("duplicate key '" + full + "'");
    }
    return out;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kConfig, "line " + std::to_string(line_) + ": " + what);
  }

  void skip_blank() {
    while (peek() == ' ' || peek() == '\t' || peek() == '\r') ++pos_;
  }
  void skip_comment() {
    while (pos_ < text_.size() && peek() != '\n') ++pos_;
  }
  void next_line() {
    ++pos_;
    ++line_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void end_of_line() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (pos_ < text_.size()) {
      if (peek() != '\n') fail("unexpected trailing characters");
      next_line();
    }
  }

  std::string key() {
    skip_blank();
    const std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  Value value() {
    Value v;
    if (peek() == '[') {
      ++pos_;
      v.is_array = true;
      skip_blank();
      while (peek() != ']') {
        v.array.push_back(scalar());
        skip_blank();
        if (peek() == ',') {
          ++pos_;
          skip_blank();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      ++pos_;
      return v;
    }
    v.scalar = scalar();
    return v;
  }

  Scalar scalar() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < text_.size() && peek() != '\'' && peek() != '\n') ++pos_;
      if (peek() != '\'') fail("unterminated literal string");
      return std::string(text_.substr(start, pos_++ - start));
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' &&
           peek() != ']' && peek() != '#') {
      ++pos_;
    }
    std::string tok(text_.substr(start, pos_ - start));
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::erase(tok, '_');
    if (tok.empty()) fail("expected a value");
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), i);
    if (ec == std::errc() && p == tok.data() + tok.size()) return i;
    double d = 0;
    auto [pd, ecd] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ecd == std::errc() && pd == tok.data() + tok.size()) return d;
    fail("cannot parse value '" + tok + "'");
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      const char e = text_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

std::string as_string(const std::string& key, const Value& v) {
  if (v.is_array || !std::holds_alternative<std::string>(v.scalar)) {
    throw Error(ErrorKind::kConfig, "'" + key + "' must be a string");
  }
  return std::get<std::string>(v.scalar);
}

std::int64_t as_int(const std::string& key, const Value& v) {
  if (v.is_array || !std::holds_alternative<std::int64_t>(v.scalar)) {
    throw Error(ErrorKind::kConfig, "'" + key + "' must be an integer");
  }
  return std::get<std::int64_t>(v.scalar);
}

double as_double(const std::string& key, const Value& v) {
  if (!v.is_array) {
    if (const auto* d = std::get_if<double>(&v.scalar)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v.scalar)) return static_cast<double>(*i);
  }
  throw Error(ErrorKind::kConfig, "'" + key + "' must be a number");
}

bool as_bool(const std::string& key, const Value& v) {
  if (v.is_array || !std::holds_alternative<bool>(v.scalar)) {
    throw Error(ErrorKind::kConfig, "'" + key + "' must be true or false");
  }
  return std::get<bool>(v.scalar);
}

std::vector<std::string> as_strings(const std::string& key, const Value& v) {
  if (!v.is_array) throw Error(ErrorKind::kConfig, "'" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v.array) {
    if (!std::holds_alternative<std::string>(s)) {
      throw Error(ErrorKind::kConfig, "'" + key + "' must be an array of strings");
    }
    out.push_back(std::get<std::string>(s));
  }
  return out;
}

int as_small_int(const std::string& key, const Value& v) {
  const auto i = as_int(key, v);
  if (i < INT32_MIN || i > INT32_MAX) throw Error(ErrorKind::kConfig, "'" + key + "' is out of range");
  return static_cast<int>(i);
}

bool valid_identifier(std::string_view id) {
  static const std::regex re("[A-Za-z0-9][A-Za-z0-9_.-]*");
  return std::regex_match(id.begin(), id.end(), re);
}

}  // namespace

std::string_view to_string(RunMode mode) { return mode == RunMode::kEagers ? "eagers" : "baseline"; }

RunMode parse_run_mode(std::string_view text) {
  if (text == "eagers") return RunMode::kEagers;
  if (text == "baseline") return RunMode::kBaseline;
  throw Error(ErrorKind::kConfig, "mode must be 'eagers' or 'baseline', got '" + std::string(text) + "'");
}

bool valid_prompt_id(std::string_view id) {
  static const std::regex re("[a-z][a-z0-9_]*_v[0-9]+");
  return std::regex_match(id.begin(), id.end(), re);
}

void PipelineConfig::validate() const {
  if (!grid.valid()) throw Error(ErrorKind::kConfig, "grid needs cols >= 1 and rows >= 1");
  if (!(margin_fraction >= 0.0 && margin_fraction <= 1.0)) {
    throw Error(ErrorKind::kConfig, "margin must be in [0, 1]");
  }
  if (max_side < 1) throw Error(ErrorKind::kConfig, "max_side must be >= 1");
  if (!(anls_threshold >= 0.0 && anls_threshold <= 1.0)) {
    throw Error(ErrorKind::kConfig, "anls_threshold must be in [0, 1]");
  }
  if (embedder_ids.empty()) throw Error(ErrorKind::kConfig, "at least one embedder id is required");
  for (const auto& id : embedder_ids) {
    if (!valid_identifier(id)) throw Error(ErrorKind::kConfig, "invalid embedder id '" + id + "'");
  }
  if (std::set<std::string>(embedder_ids.begin(), embedder_ids.end()).size() != embedder_ids.size()) {
    throw Error(ErrorKind::kConfig, "embedder ids must be distinct");
  }
  if (model_id.empty()) throw Error(ErrorKind::kConfig, "model_id is empty");
  if (!valid_prompt_id(explain_prompt_id)) {
    throw Error(ErrorKind::kConfig, "invalid explain prompt id '" + explain_prompt_id + "'");
  }
  if (!valid_prompt_id(answer_prompt_id)) {
    throw Error(ErrorKind::kConfig, "invalid answer prompt id '" + answer_prompt_id + "'");
  }
  if (concurrency < 1) throw Error(ErrorKind::kConfig, "concurrency must be >= 1");
}

std::string canonical_config_json(const PipelineConfig& cfg) {
  const nlohmann::json j{
      {"mode", to_string(cfg.mode)},
      {"cols", cfg.grid.cols},
      {"rows", cfg.grid.rows},
      {"margin", cfg.margin_fraction},
      {"max_side", cfg.max_side},
      {"anls_threshold", cfg.anls_threshold},
      {"embedder_ids", cfg.embedder_ids},
      {"model_id", cfg.model_id},
      {"explain_prompt", cfg.explain_prompt_id},
      {"answer_prompt", cfg.answer_prompt_id},
      {"raw_em", cfg.raw_em},
  };
  return j.dump();
}

PipelineConfig config_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::kFormat, "config echo is not a JSON object");
  try {
    PipelineConfig cfg;
    cfg.mode = parse_run_mode(j.at("mode").get<std::string>());
    cfg.grid = {j.at("cols").get<int>(), j.at("rows").get<int>()};
    cfg.margin_fraction = j.at("margin").get<double>();
    cfg.max_side = j.at("max_side").get<int>();
    cfg.anls_threshold = j.at("anls_threshold").get<double>();
    cfg.embedder_ids = j.at("embedder_ids").get<std::vector<std::string>>();
    cfg.model_id = j.at("model_id").get<std::string>();
    cfg.explain_prompt_id = j.at("explain_prompt").get<std::string>();
    cfg.answer_prompt_id = j.at("answer_prompt").get<std::string>();
    cfg.raw_em = j.at("raw_em").get<bool>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("config echo: ") + e.what());
  }
}

std::string config_hash(const PipelineConfig& cfg) {
  return sha256_hex(canonical_config_json(cfg)).substr(0, 16);
}

RunConfig parse_config_toml(std::string_view text, RunConfig base) {
  const auto entries = TomlReader(text).read();
  RunConfig out = std::move(base);
  auto& p = out.pipeline;
  auto& b = out.backend;
  for (const auto& [key, v] : entries) {
    if (key == "mode") p.mode = parse_run_mode(as_string(key, v));
    else if (key == "cols") p.grid.cols = as_small_int(key, v);
    else if (key == "rows") p.grid.rows = as_small_int(key, v);
    else if (key == "margin") p.margin_fraction = as_double(key, v);
    else if (key == "max_side") p.max_side = as_small_int(key, v);
    else if (key == "anls_threshold") p.anls_threshold = as_double(key, v);
    else if (key == "embedder_ids") p.embedder_ids = as_strings(key, v);
    else if (key == "model_id") p.model_id = as_string(key, v);
    else if (key == "explain_prompt") p.explain_prompt_id = as_string(key, v);
    else if (key == "answer_prompt") p.answer_prompt_id = as_string(key, v);
    else if (key == "raw_em") p.raw_em = as_bool(key, v);
    else if (key == "concurrency") p.concurrency = as_small_int(key, v);
    else if (key == "write_masked") p.write_masked = as_bool(key, v);
    else if (key == "backend.base_url") b.base_url = as_string(key, v);
    else if (key == "backend.timeout") b.timeout_seconds = as_double(key, v);
    else if (key == "backend.retries") b.retries = as_small_int(key, v);
    else if (key == "backend.max_in_flight") b.max_in_flight = as_small_int(key, v);
    else throw Error(ErrorKind::kConfig, "unknown config key '" + key + "'");
  }
  b.embedder_ids = p.embedder_ids;
  b.model_id = p.model_id;
  p.validate();
  return out;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::string text;
  try {
    text = read_file_text(path);
  } catch (const Error&) {
    throw Error(ErrorKind::kConfig, "cannot read config file " + path.string());
  }
  try {
    return parse_config_toml(text, std::move(base));
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
}

std::vector<std::string> preset_names() {
  return {"eagers_25_0", "eagers_50_0", "eagers_25_15", "eagers_50_15", "baseline"};
}

RunConfig preset(std::string_view name) {
  RunConfig cfg;
  auto& p = cfg.pipeline;
  if (name == "baseline") {
    p.mode = RunMode::kBaseline;
    return cfg;
  }
  if (name == "eagers_25_0" || name == "eagers_25_15") {
    p.grid = {5, 5};
  } else if (name == "eagers_50_0" || name == "eagers_50_15") {
    p.grid = {5, 10};
  } else {
    throw Error(ErrorKind::kConfig, "unknown preset '" + std::string(name) + "'");
  }
  p.margin_fraction = name.ends_with("_15") ? 0.15 : 0.0;
  return cfg;
}

}  // namespace eagers
