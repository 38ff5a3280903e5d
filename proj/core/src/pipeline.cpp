#include "eagers/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"
#include "eagers/geometry.hpp"
#include "eagers/imaging.hpp"

namespace eagers {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json selection_json(const SelectionResult& s) {
  json selected = json::array();
  for (const auto& c : s.selected) selected.push_back({c.row, c.col});
  return {{"selected", selected}, {"votes", s.votes}, {"mean_scores", s.mean_scores}};
}

SelectionResult selection_from(const json& j) {
  SelectionResult s;
  for (const auto& c : j.at("selected")) s.selected.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  s.votes = j.at("votes").get<std::vector<int>>();
  s.mean_scores = j.at("mean_scores").get<std::vector<double>>();
  return s;
}

}  // namespace

std::string outcome_to_json(const QuestionOutcome& o) {
  json j{{"question_id", o.question_id},
         {"image_path", o.image_path},
         {"failed", o.failed},
         {"failed_stage", o.failed_stage},
         {"error", o.error},
         {"explanation", o.explanation},
         {"answer", o.answer},
         {"judgment", {{"em", o.judgment.em}, {"anls", o.judgment.anls_score}, {"best_reference", o.judgment.best_reference}}},
         {"latencies",
          {{"explanation", o.latencies.explanation},
           {"embeddings", o.latencies.embeddings},
           {"answer", o.latencies.answer}}},
         {"total_seconds", o.total_seconds}};
  j["selection"] = o.selection ? selection_json(*o.selection) : json(nullptr);
  return j.dump(2) + "\n";
}

QuestionOutcome outcome_from_json(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::kFormat, "outcome is not a JSON object");
  try {
    QuestionOutcome o;
    o.question_id = j.at("question_id").get<std::string>();
    o.image_path = j.at("image_path").get<std::string>();
    o.failed = j.at("failed").get<bool>();
    o.failed_stage = j.at("failed_stage").get<std::string>();
    o.error = j.at("error").get<std::string>();
    o.explanation = j.at("explanation").get<std::string>();
    o.answer = j.at("answer").get<std::string>();
    const auto& jd = j.at("judgment");
    o.judgment = {jd.at("em").get<int>(), jd.at("anls").get<double>(), jd.at("best_reference").get<int>()};
    const auto& lat = j.at("latencies");
    o.latencies = {lat.at("explanation").get<double>(), lat.at("embeddings").get<double>(),
                   lat.at("answer").get<double>()};
    o.total_seconds = j.at("total_seconds").get<double>();
    if (!j.at("selection").is_null()) o.selection = selection_from(j.at("selection"));
    return o;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("outcome: ") + e.what());
  }
}

Pipeline::Pipeline(PipelineConfig cfg, Backend& backend, fs::path out_dir)
    : cfg_(std::move(cfg)),
      backend_(backend),
      out_dir_(std::move(out_dir)),
      hash_(config_hash(cfg_)),
      store_(out_dir_ / "runs" / hash_, hash_, cfg_.mode),
      embedding_store_(out_dir_ / "embeddings") {
  cfg_.validate();
  if (cfg_.mode == RunMode::kEagers) {
    for (const auto& id : cfg_.embedder_ids) {
      const auto& have = backend_.embedder_ids();
      if (std::find(have.begin(), have.end(), id) == have.end()) {
        throw Error(ErrorKind::kConfig, "backend does not provide embedder '" + id + "'");
      }
    }
  }
}

std::vector<EmbedderVectors> Pipeline::embed_cells(const QARecord& record, const ImageBuffer& image,
                                                   const std::vector<GridCell>& cells,
                                                   const std::string& explanation, double& latency) {
  const std::string scope = EmbeddingStore::scope_for(cfg_);
  const std::string explanation_item = "explanation-" + sha256_hex(explanation).substr(0, 16);

  auto fetch = [&](const std::string& embedder, const std::string& item, const EmbedRequest& req) {
    if (auto hit = embedding_store_.get(scope, record.question_id, embedder, item)) {
      latency += hit->latency_seconds;
      return hit->vector;
    }
    auto resp = backend_.embed(req);
    auto vec = std::move(resp.vectors.at(embedder));
    embedding_store_.put(scope, record.question_id, embedder, item, {vec, resp.latency_seconds});
    latency += resp.latency_seconds;
    return vec;
  };

  std::vector<EmbedderVectors> out;
  for (const auto& id : cfg_.embedder_ids) {
    EmbedderVectors e;
    e.embedder_id = id;
    EmbedRequest req;
    req.modality = Modality::kText;
    req.text = explanation;
    req.embedder_ids = {id};
    e.explanation = fetch(id, explanation_item, req);
    e.cells.reserve(cells.size());
    out.push_back(std::move(e));
  }
  for (const auto& cell : cells) {
    EmbedRequest req;
    req.modality = Modality::kImage;
    req.image = encode_png(crop(image, cell.rect));
    const std::string item = "cell-" + std::to_string(cell.index.linear(cfg_.grid));
    for (auto& e : out) {
      req.embedder_ids = {e.embedder_id};
      e.cells.push_back(fetch(e.embedder_id, item, req));
    }
  }
  return out;
}

QuestionOutcome Pipeline::run_eagers(const QARecord& record) {
  QuestionOutcome out;
  out.question_id = record.question_id;
  out.image_path = record.image_path.string();
  std::string stage = "load";
  try {
    const ImageBuffer image = resize_longest_side(load_image(record.image_path), cfg_.max_side);

    stage = "explanation";
    if (auto hit = store_.get(record.question_id, Stage::kExplanation)) {
      out.explanation = hit->payload;
      out.latencies.explanation = hit->latency_seconds;
    } else {
      auto resp = backend_.explain({encode_png(image), record.question, cfg_.explain_prompt_id});
      out.explanation = resp.explanation;
      out.latencies.explanation = resp.latency_seconds;
      store_.put({record.question_id, Stage::kExplanation, resp.explanation, resp.latency_seconds});
    }

    stage = "embeddings";
    const auto cells = partition(image.width(), image.height(), cfg_.grid);
    std::vector<EmbedderVectors> embeddings;
    if (auto hit = store_.get(record.question_id, Stage::kEmbeddings)) {
      embeddings = parse_embeddings_payload(hit->payload);
      out.latencies.embeddings = hit->latency_seconds;
    } else {
      double latency = 0.0;
      embeddings = embed_cells(record, image, cells, out.explanation, latency);
      out.latencies.embeddings = latency;
      store_.put({record.question_id, Stage::kEmbeddings, embeddings_payload(embeddings), latency});
    }

    stage = "selection";
    const auto sim = score_cells(embeddings, cells.size());
    out.selection = fuse_majority(sim, cfg_.grid);
    store_.put({record.question_id, Stage::kSelection, selection_payload(*out.selection, cfg_.grid), 0.0});

    stage = "mask";
    const auto visible = visible_region(out.selection->selected, cfg_.grid, cfg_.margin_fraction,
                                        image.width(), image.height());
    const ImageBuffer masked = apply_mask(image, visible);
    auto masked_png = encode_png(masked);
    if (cfg_.write_masked) {
      write_file_atomic(store_.question_dir(record.question_id) / "masked.png",
                        std::string_view(reinterpret_cast<const char*>(masked_png.data()), masked_png.size()));
    }

    stage = "answer";
    if (auto hit = store_.get(record.question_id, Stage::kAnswer)) {
      out.answer = hit->payload;
      out.latencies.answer = hit->latency_seconds;
    } else {
      // Only the masked image and the question cross this boundary.
      auto resp = backend_.answer({std::move(masked_png), record.question, cfg_.answer_prompt_id});
      out.answer = resp.answer;
      out.latencies.answer = resp.latency_seconds;
      store_.put({record.question_id, Stage::kAnswer, resp.answer, resp.latency_seconds});
    }

    stage = "judge";
    out.judgment = judge(out.answer, record.answers, cfg_.anls_threshold, cfg_.raw_em);
  } catch (const std::exception& e) {
    out.failed = true;
    out.failed_stage = stage;
    out.error = e.what();
    out.judgment = {};
    spdlog::warn("question {} failed at {}: {}", record.question_id, stage, e.what());
  }
  return out;
}

QuestionOutcome Pipeline::run_baseline(const QARecord& record) {
  QuestionOutcome out;
  out.question_id = record.question_id;
  out.image_path = record.image_path.string();
  std::string stage = "load";
  try {
    const ImageBuffer image = resize_longest_side(load_image(record.image_path), cfg_.max_side);
    stage = "answer";
    if (auto hit = store_.get(record.question_id, Stage::kAnswer)) {
      out.answer = hit->payload;
      out.latencies.answer = hit->latency_seconds;
    } else {
      auto resp = backend_.answer({encode_png(image), record.question, cfg_.answer_prompt_id});
      out.answer = resp.answer;
      out.latencies.answer = resp.latency_seconds;
      store_.put({record.question_id, Stage::kAnswer, resp.answer, resp.latency_seconds});
    }
    stage = "judge";
    out.judgment = judge(out.answer, record.answers, cfg_.anls_threshold, cfg_.raw_em);
  } catch (const std::exception& e) {
    out.failed = true;
    out.failed_stage = stage;
    out.error = e.what();
    out.judgment = {};
    spdlog::warn("question {} failed at {}: {}", record.question_id, stage, e.what());
  }
  return out;
}

QuestionOutcome Pipeline::run_question(const QARecord& record) {
  QuestionOutcome out = cfg_.mode == RunMode::kEagers ? run_eagers(record) : run_baseline(record);
  out.total_seconds = out.latencies.explanation + out.latencies.embeddings + out.latencies.answer;
  write_file_atomic(store_.question_dir(record.question_id) / "outcome.json", outcome_to_json(out));
  return out;
}

SplitResult Pipeline::run_split(const Dataset& dataset) {
  if (dataset.records.empty()) throw Error(ErrorKind::kEmptyRun, "no records to run");

  const fs::path run_dir = store_.run_dir();
  fs::create_directories(run_dir);
  const json manifest{{"config_hash", hash_},
                      {"config", json::parse(canonical_config_json(cfg_))},
                      {"dataset_digest", dataset.digest},
                      {"dataset_root", fs::absolute(dataset.root).string()},
                      {"questions", dataset.records.size()},
                      {"timestamp", utc_timestamp()},
                      {"tool_version", EAGERS_VERSION}};
  write_file_atomic(run_dir / "manifest.json", manifest.dump(2) + "\n");
  write_file_atomic(run_dir / "skipped.jsonl", skip_report_jsonl(dataset.skipped));

  std::vector<QuestionOutcome> outcomes(dataset.records.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < outcomes.size(); i = next.fetch_add(1)) {
      try {
        outcomes[i] = run_question(dataset.records[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg_.concurrency), outcomes.size());
  std::vector<std::jthread> workers;
  for (std::size_t w = 1; w < n_workers; ++w) workers.emplace_back(worker);
  worker();
  workers.clear();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<AnswerJudgment> judgments;
  std::vector<double> timings;
  EvalReport report;
  report.config = cfg_;
  report.config_hash = hash_;
  for (const auto& o : outcomes) {
    judgments.push_back(o.judgment);
    timings.push_back(o.total_seconds);
    report.outcomes.push_back({o.question_id, o.judgment.em, o.judgment.anls_score, o.total_seconds, o.failed_stage});
    if (o.failed) ++report.failed;
  }
  const auto scores = aggregate(judgments, timings);
  report.em_percent = scores.em_percent;
  report.anls = scores.anls;
  report.anls_percent = scores.anls_percent;
  report.timing = scores.timing;
  report.questions = outcomes.size();
  report.skipped = dataset.skipped.size();
  write_file_atomic(run_dir / "report.json", report_to_json(report));

  return {std::move(report), std::move(outcomes), run_dir};
}

ImageBuffer masked_image_for(const QuestionOutcome& outcome, const PipelineConfig& cfg) {
  if (!outcome.selection || outcome.selection->selected.empty()) {
    throw Error(ErrorKind::kInvalidSelection, "question '" + outcome.question_id + "' has no selection");
  }
  const ImageBuffer image = resize_longest_side(load_image(outcome.image_path), cfg.max_side);
  const auto visible = visible_region(outcome.selection->selected, cfg.grid, cfg.margin_fraction,
                                      image.width(), image.height());
  return apply_mask(image, visible);
}

}  // namespace eagers
