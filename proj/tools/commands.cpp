#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>

#include <nlohmann/json.hpp>

#include "eagers/backends.hpp"
#include "eagers/codec.hpp"
#include "eagers/config.hpp"
#include "eagers/dataset.hpp"
#include "eagers/error.hpp"
#include "eagers/pipeline.hpp"
#include "eagers/report.hpp"
#include "eagers/run_store.hpp"
#include "eagers/synth.hpp"

namespace eagers::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunArgs {
  std::string config_path;
  std::string preset_name;
  std::string dataset_root;
  std::string split_file;
  std::string mode;
  std::string mock;
  std::string fixture_file;
  std::string out_dir = "eagers-out";
  std::string base_url;
  int max_side = 0;
  int concurrency = 0;
  bool write_masked = false;
  std::uint64_t seed = 0;
};

struct ReportArgs {
  std::vector<std::string> run_dirs;
  std::string format = "text";
};

struct InspectArgs {
  std::string run_dir;
  std::string question_id;
};

struct SynthArgs {
  std::string out_dir;
  int count = 25;
  std::uint64_t seed = 7;
};

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kConfig:
    case ErrorKind::kPrecondition:
      return kBadConfig;
    case ErrorKind::kBackendUnavailable:
      return kBackendUnreachable;
    case ErrorKind::kFormat:
    case ErrorKind::kEmptyDataset:
    case ErrorKind::kDuplicateId:
      return kBadDataset;
    default:
      return kFailure;
  }
}

std::unique_ptr<Backend> make_mock(const std::string& kind, const RunConfig& cfg, const Dataset& ds,
                                   const std::string& fixture_file, std::uint64_t seed) {
  if (kind == "planted" || kind == "adversarial") {
    PlantedOptions opts;
    opts.adversarial = kind == "adversarial";
    opts.seed = seed;
    for (const auto& r : ds.records) opts.answers[r.question] = r.answers.front();
    return std::make_unique<PlantedBackend>(std::move(opts), cfg.pipeline.embedder_ids);
  }
  if (kind == "fixture") {
    auto backend = std::make_unique<FixtureBackend>(cfg.pipeline.embedder_ids, seed);
    if (!fixture_file.empty()) {
      const json j = json::parse(read_file_text(fixture_file), nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorKind::kConfig, fixture_file + " is not a JSON object");
      }
      const json explanations = j.value("explanations", json::object());
      const json answers = j.value("answers", json::object());
      if (!explanations.is_object() || !answers.is_object()) {
        throw Error(ErrorKind::kConfig, fixture_file + ": explanations and answers must be objects");
      }
      for (const auto& [q, text] : explanations.items()) {
        backend->set_explanation(q, text.get<std::string>());
      }
      for (const auto& [q, text] : answers.items()) {
        backend->set_answer(q, text.get<std::string>());
      }
    }
    return backend;
  }
  throw Error(ErrorKind::kConfig, "unknown mock kind '" + kind + "' (planted, adversarial, fixture)");
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    if (!a.config_path.empty() && !a.preset_name.empty()) {
      throw Error(ErrorKind::kConfig, "--config and --preset are mutually exclusive");
    }
    if (!a.preset_name.empty()) cfg = preset(a.preset_name);
    if (!a.config_path.empty()) cfg = load_config_file(a.config_path);
    if (!a.mode.empty()) cfg.pipeline.mode = parse_run_mode(a.mode);
    if (a.max_side > 0) cfg.pipeline.max_side = a.max_side;
    if (a.concurrency > 0) cfg.pipeline.concurrency = a.concurrency;
    if (a.write_masked) cfg.pipeline.write_masked = true;
    if (!a.base_url.empty()) {
      cfg.backend.base_url = a.base_url;
    } else if (cfg.backend.base_url.empty()) {
      if (const char* env = std::getenv("EAGERS_BASE_URL")) cfg.backend.base_url = env;
    }
    cfg.backend.embedder_ids = cfg.pipeline.embedder_ids;
    cfg.backend.model_id = cfg.pipeline.model_id;
    cfg.pipeline.validate();
    if (a.mock.empty()) {
      if (cfg.backend.base_url.empty()) {
        throw Error(ErrorKind::kConfig, "no backend: pass --mock, --base-url, or set EAGERS_BASE_URL");
      }
      cfg.backend.validate();
    }
    if (a.dataset_root.empty() || a.split_file.empty()) {
      throw Error(ErrorKind::kConfig, "--dataset-root and --split-file are required");
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadConfig;
  }

  try {
    const Dataset ds = load_dataset(a.dataset_root, a.split_file);
    std::unique_ptr<Backend> backend;
    if (!a.mock.empty()) {
      backend = make_mock(a.mock, cfg, ds, a.fixture_file, a.seed);
    } else {
      auto http = std::make_unique<HttpBackend>(cfg.backend);
      if (!http->reachable()) {
        err << "error: backend at " << cfg.backend.base_url << " is unreachable\n";
        return kBackendUnreachable;
      }
      backend = std::move(http);
    }
    Pipeline pipeline(cfg.pipeline, *backend, a.out_dir);
    const auto result = pipeline.run_split(ds);
    out << render_table({row_for(result.report, result.run_dir.string())});
    out << "questions: " << result.report.questions << "  failed: " << result.report.failed
        << "  skipped: " << result.report.skipped << "\n";
    out << "run directory: " << result.run_dir.string() << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "text" && a.format != "json") {
    err << "error: --format must be text or json\n";
    return kBadConfig;
  }
  std::vector<ReportRow> rows;
  for (const auto& dir : a.run_dirs) rows.push_back(load_row(dir));
  rows = sort_rows(std::move(rows));
  out << (a.format == "json" ? rows_to_json(rows) : render_table(rows));
  return kOk;
}

std::string fmt4(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

int cmd_inspect(const InspectArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path run_dir = a.run_dir;
  PipelineConfig cfg;
  std::string hash;
  try {
    const json manifest = json::parse(read_file_text(run_dir / "manifest.json"));
    cfg = config_from_json(manifest.at("config").dump());
    hash = manifest.at("config_hash").get<std::string>();
  } catch (const std::exception& e) {
    err << "error: " << run_dir.string() << " is not a run directory: " << e.what() << "\n";
    return kBadConfig;
  }
  const RunStore store(run_dir, hash, cfg.mode);
  const fs::path qdir = store.question_dir(a.question_id);
  QuestionOutcome o;
  try {
    o = outcome_from_json(read_file_text(qdir / "outcome.json"));
  } catch (const Error&) {
    err << "error: question '" << a.question_id << "' is not in " << run_dir.string() << "\n";
    return kUnknownQuestion;
  }

  out << "question:    " << o.question_id << "\n";
  out << "image:       " << o.image_path << "\n";
  out << "mode:        " << to_string(cfg.mode) << "\n";
  if (o.failed) {
    out << "status:      failed at stage '" << o.failed_stage << "'\n";
    out << "error:       " << o.error << "\n";
  } else {
    out << "status:      ok\n";
  }
  if (cfg.mode == RunMode::kEagers) {
    out << "explanation: " << o.explanation << "\n";
    if (o.selection) {
      const auto& s = *o.selection;
      out << "grid:        " << cfg.grid.cols << "x" << cfg.grid.rows << " (k=" << s.selected.size()
          << ", margin " << cfg.margin_fraction << ")\n";
      out << "selected:\n";
      out << "  rank  cell     linear  votes  mean\n";
      for (std::size_t i = 0; i < s.selected.size(); ++i) {
        const auto& c = s.selected[i];
        const auto lin = static_cast<std::size_t>(c.linear(cfg.grid));
        std::ostringstream cell;
        cell << "(" << c.row << "," << c.col << ")";
        out << "  " << std::setw(4) << i + 1 << "  " << std::left << std::setw(7) << cell.str() << std::right
            << "  " << std::setw(6) << lin << "  " << std::setw(5) << s.votes[lin] << "  "
            << fmt4(s.mean_scores[lin]) << "\n";
      }
      out << "votes:       ";
      for (std::size_t i = 0; i < s.votes.size(); ++i) out << (i ? " " : "") << s.votes[i];
      out << "\nmean scores: ";
      for (std::size_t i = 0; i < s.mean_scores.size(); ++i) out << (i ? " " : "") << fmt4(s.mean_scores[i]);
      out << "\n";
      const fs::path masked = qdir / "masked.png";
      if (!fs::exists(masked)) {
        try {
          write_png(masked, masked_image_for(o, cfg));
        } catch (const std::exception& e) {
          err << "warning: cannot rebuild masked image: " << e.what() << "\n";
        }
      }
      out << "masked:      " << masked.string() << "\n";
    }
  }
  if (!o.failed) {
    out << "answer:      " << o.answer << "\n";
  }
  out << "judgment:    em=" << o.judgment.em << " anls=" << fmt4(o.judgment.anls_score)
      << " best_reference=" << o.judgment.best_reference << "\n";
  out << "latency (s): explanation=" << fmt4(o.latencies.explanation)
      << " embeddings=" << fmt4(o.latencies.embeddings) << " answer=" << fmt4(o.latencies.answer)
      << " total=" << fmt4(o.total_seconds) << "\n";
  return kOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const auto items = synth::write_corpus(a.out_dir, a.count, a.seed);
    out << "wrote " << items.size() << " planted questions to " << a.out_dir << "\n";
    out << "split file: " << (fs::path(a.out_dir) / "split.json").string() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EaGERS document VQA pipeline and evaluation harness", "eagers"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a split through the pipeline (or baseline) and write a report");
  run_cmd->add_option("--config", run_args.config_path, "TOML config file");
  run_cmd->add_option("--preset", run_args.preset_name, "Built-in config preset")
      ->check(CLI::IsMember(preset_names()));
  run_cmd->add_option("--dataset-root", run_args.dataset_root, "Directory that image paths are relative to");
  run_cmd->add_option("--split-file", run_args.split_file, "DocVQA-style split JSON");
  run_cmd->add_option("--mode", run_args.mode, "eagers | baseline")->check(CLI::IsMember({"eagers", "baseline"}));
  run_cmd->add_option("--mock", run_args.mock, "Offline backend: planted | adversarial | fixture");
  run_cmd->add_option("--fixture", run_args.fixture_file, "JSON fixture for --mock fixture");
  run_cmd->add_option("--out", run_args.out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--max-side", run_args.max_side, "Longest image side after resizing");
  run_cmd->add_option("--base-url", run_args.base_url, "Inference server (falls back to EAGERS_BASE_URL)");
  run_cmd->add_option("--concurrency", run_args.concurrency, "Questions processed in parallel");
  run_cmd->add_option("--seed", run_args.seed, "Seed for mock backends");
  run_cmd->add_flag("--write-masked", run_args.write_masked, "Save masked images as PNG");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Compare completed runs in a Table-1 style table");
  report_cmd->add_option("run_dirs", report_args.run_dirs, "Run directories (<out>/runs/<hash>)")->required();
  report_cmd->add_option("--format", report_args.format, "text | json")->capture_default_str();

  InspectArgs inspect_args;
  auto* inspect_cmd = app.add_subcommand("inspect", "Show every stage recorded for one question");
  inspect_cmd->add_option("run_dir", inspect_args.run_dir, "Run directory")->required();
  inspect_cmd->add_option("question_id", inspect_args.question_id, "Question id")->required();

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic planted-evidence corpus");
  synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth_args.count, "Number of questions")->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed, "Generator seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kBadConfig;
  }

  if (run_cmd->parsed()) return cmd_run(run_args, out, err);
  if (report_cmd->parsed()) return cmd_report(report_args, out, err);
  if (inspect_cmd->parsed()) return cmd_inspect(inspect_args, out, err);
  if (synth_cmd->parsed()) return cmd_synth(synth_args, out, err);
  return kBadConfig;
}

}  // namespace eagers::cli
