#include "eagers/run_store.hpp"

#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"

namespace eagers {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kEntryVersion = 1;

// Question ids and embedder ids become path components.
std::string path_component(std::string_view id) {
  static const std::regex safe("[A-Za-z0-9_][A-Za-z0-9_.-]{0,63}");
  if (std::regex_match(id.begin(), id.end(), safe)) return std::string(id);
  return "q-" + sha256_hex(id).substr(0, 16);
}

fs::path temp_path_for(const fs::path& path) {
  static std::atomic<std::uint64_t> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  return path.parent_path() /
         (path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(tid) +
          "." + std::to_string(counter.fetch_add(1)));
}

void write_temp(const fs::path& tmp, std::string_view contents) {
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
}

std::optional<json> read_entry(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    spdlog::warn("cache entry {} is corrupt; ignoring", path.string());
    return std::nullopt;
  }
  return j;
}

int stage_rank(Stage s) { return static_cast<int>(s); }

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kExplanation: return "explanation";
    case Stage::kEmbeddings: return "embeddings";
    case Stage::kSelection: return "selection";
    case Stage::kAnswer: return "answer";
  }
  return "unknown";
}

Stage parse_stage(std::string_view text) {
  for (Stage s : {Stage::kExplanation, Stage::kEmbeddings, Stage::kSelection, Stage::kAnswer}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorKind::kFormat, "unknown stage '" + std::string(text) + "'");
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  const auto tmp = temp_path_for(path);
  write_temp(tmp, contents);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::kIo, "cannot rename into " + path.string());
  }
}

bool write_file_once(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  const auto tmp = temp_path_for(path);
  write_temp(tmp, contents);
  // link(2) fails with EEXIST if another writer got there first.
  const bool won = ::link(tmp.c_str(), path.c_str()) == 0;
  const int err = errno;
  std::error_code ec;
  fs::remove(tmp, ec);
  if (!won && err != EEXIST) {
    throw Error(ErrorKind::kIo, "cannot create " + path.string() + ": " + std::strerror(err));
  }
  return won;
}

RunStore::RunStore(fs::path run_dir, std::string config_hash, RunMode mode)
    : run_dir_(std::move(run_dir)), config_hash_(std::move(config_hash)), mode_(mode) {}

fs::path RunStore::question_dir(std::string_view question_id) const {
  return run_dir_ / path_component(question_id);
}

fs::path RunStore::stage_path(std::string_view question_id, Stage stage) const {
  return question_dir(question_id) / (std::string(to_string(stage)) + ".json");
}

std::optional<StageArtifact> RunStore::get(std::string_view question_id, Stage stage) const {
  const auto path = stage_path(question_id, stage);
  const auto j = read_entry(path);
  if (!j) return std::nullopt;
  try {
    StageArtifact a;
    a.question_id = j->at("question_id").get<std::string>();
    a.stage = parse_stage(j->at("stage").get<std::string>());
    a.payload = j->at("payload").get<std::string>();
    a.latency_seconds = j->at("latency_seconds").get<double>();
    if (j->at("version").get<int>() != kEntryVersion || j->at("config_hash").get<std::string>() != config_hash_ ||
        a.question_id != question_id || a.stage != stage || j->at("sha256").get<std::string>() != sha256_hex(a.payload)) {
      spdlog::warn("cache entry {} does not verify; treating as a miss", path.string());
      return std::nullopt;
    }
    return a;
  } catch (const std::exception&) {
    spdlog::warn("cache entry {} is malformed; treating as a miss", path.string());
    return std::nullopt;
  }
}

bool RunStore::put(const StageArtifact& artifact) {
  if (mode_ == RunMode::kBaseline && artifact.stage != Stage::kAnswer) {
    throw Error(ErrorKind::kPrecondition, "baseline runs only store answers");
  }
  if (mode_ == RunMode::kEagers && artifact.stage != Stage::kExplanation) {
    const auto prev = static_cast<Stage>(stage_rank(artifact.stage) - 1);
    if (!fs::exists(stage_path(artifact.question_id, prev))) {
      throw Error(ErrorKind::kPrecondition, "cannot store " + std::string(to_string(artifact.stage)) +
                                                " for '" + artifact.question_id + "' before " +
                                                std::string(to_string(prev)));
    }
  }
  const json j{{"version", kEntryVersion},
               {"config_hash", config_hash_},
               {"question_id", artifact.question_id},
               {"stage", to_string(artifact.stage)},
               {"latency_seconds", artifact.latency_seconds},
               {"payload", artifact.payload},
               {"sha256", sha256_hex(artifact.payload)}};
  const auto path = stage_path(artifact.question_id, artifact.stage);
  if (fs::exists(path) && !get(artifact.question_id, artifact.stage)) {
    // A corrupt entry must not block the fresh value.
    write_file_atomic(path, j.dump());
    return true;
  }
  return write_file_once(path, j.dump());
}

EmbeddingStore::EmbeddingStore(fs::path root) : root_(std::move(root)) {}

fs::path EmbeddingStore::path_for(std::string_view scope, std::string_view question_id,
                                  std::string_view embedder, std::string_view item) const {
  return root_ / std::string(scope) / path_component(question_id) / path_component(embedder) /
         (std::string(item) + ".json");
}

std::optional<EmbeddingStore::Entry> EmbeddingStore::get(std::string_view scope, std::string_view question_id,
                                                         std::string_view embedder,
                                                         std::string_view item) const {
  const auto path = path_for(scope, question_id, embedder, item);
  const auto j = read_entry(path);
  if (!j) return std::nullopt;
  try {
    Entry e;
    e.vector.values = j->at("vector").get<std::vector<double>>();
    e.latency_seconds = j->at("latency_seconds").get<double>();
    if (e.vector.values.empty() || j->at("embedder").get<std::string>() != embedder) {
      spdlog::warn("embedding entry {} does not verify; treating as a miss", path.string());
      return std::nullopt;
    }
    return e;
  } catch (const std::exception&) {
    spdlog::warn("embedding entry {} is malformed; treating as a miss", path.string());
    return std::nullopt;
  }
}

bool EmbeddingStore::put(std::string_view scope, std::string_view question_id, std::string_view embedder,
                         std::string_view item, const Entry& entry) {
  const json j{{"embedder", std::string(embedder)},
               {"item", std::string(item)},
               {"latency_seconds", entry.latency_seconds},
               {"vector", entry.vector.values}};
  return write_file_once(path_for(scope, question_id, embedder, item), j.dump());
}

std::string EmbeddingStore::scope_for(const PipelineConfig& cfg) {
  const json j{{"cols", cfg.grid.cols},
               {"rows", cfg.grid.rows},
               {"max_side", cfg.max_side},
               {"model_id", cfg.model_id},
               {"explain_prompt", cfg.explain_prompt_id}};
  return sha256_hex(j.dump()).substr(0, 16);
}

std::string embeddings_payload(const std::vector<EmbedderVectors>& embeddings) {
  json arr = json::array();
  for (const auto& e : embeddings) {
    json cells = json::array();
    for (const auto& c : e.cells) cells.push_back(c.values);
    arr.push_back({{"embedder", e.embedder_id}, {"explanation", e.explanation.values}, {"cells", cells}});
  }
  return arr.dump();
}

std::vector<EmbedderVectors> parse_embeddings_payload(std::string_view payload) {
  const json arr = json::parse(payload);
  std::vector<EmbedderVectors> out;
  for (const auto& e : arr) {
    EmbedderVectors v;
    v.embedder_id = e.at("embedder").get<std::string>();
    v.explanation.values = e.at("explanation").get<std::vector<double>>();
    for (const auto& c : e.at("cells")) v.cells.push_back({c.get<std::vector<double>>()});
    out.push_back(std::move(v));
  }
  return out;
}

std::string selection_payload(const SelectionResult& selection, const GridSpec& grid) {
  json selected = json::array();
  for (const auto& c : selection.selected) {
    selected.push_back({{"row", c.row}, {"col", c.col}, {"linear", c.linear(grid)}});
  }
  return json{{"selected", selected}, {"votes", selection.votes}, {"mean_scores", selection.mean_scores}}.dump();
}

SelectionResult parse_selection_payload(std::string_view payload) {
  const json j = json::parse(payload);
  SelectionResult s;
  for (const auto& c : j.at("selected")) s.selected.push_back({c.at("row").get<int>(), c.at("col").get<int>()});
  s.votes = j.at("votes").get<std::vector<int>>();
  s.mean_scores = j.at("mean_scores").get<std::vector<double>>();
  return s;
}

}  // namespace eagers
