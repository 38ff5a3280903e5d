#include "eagers/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"

namespace eagers {
namespace {

using nlohmann::json;

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string percent_label(double fraction) {
  const double pct = 100.0 * fraction;
  if (std::abs(pct - std::round(pct)) < 1e-9) return std::to_string(static_cast<long long>(std::llround(pct)));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", pct);
  return buf;
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json outcomes = json::array();
  for (const auto& o : r.outcomes) {
    json e{{"question_id", o.question_id}, {"em", o.em}, {"anls", o.anls}, {"total_seconds", o.total_seconds}};
    if (!o.failed_stage.empty()) e["failed_stage"] = o.failed_stage;
    outcomes.push_back(std::move(e));
  }
  const json j{
      {"config", json::parse(canonical_config_json(r.config))},
      {"config_hash", r.config_hash},
      {"em_percent", r.em_percent},
      {"anls", r.anls},
      {"anls_percent", r.anls_percent},
      {"timing",
       {{"mean_seconds", r.timing.mean_seconds},
        {"cv_percent", r.timing.cv_percent},
        {"n", r.timing.n},
        {"cv_defined", r.timing.cv_defined}}},
      {"questions", r.questions},
      {"failed", r.failed},
      {"skipped", r.skipped},
      {"skip_report", r.skip_report},
      {"outcomes", outcomes},
  };
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::kFormat, "report is not a JSON object");
  try {
    EvalReport r;
    r.config = config_from_json(j.at("config").dump());
    r.config_hash = j.at("config_hash").get<std::string>();
    r.em_percent = j.at("em_percent").get<double>();
    r.anls = j.at("anls").get<double>();
    r.anls_percent = j.at("anls_percent").get<double>();
    const auto& t = j.at("timing");
    r.timing.mean_seconds = t.at("mean_seconds").get<double>();
    r.timing.cv_percent = t.at("cv_percent").get<double>();
    r.timing.n = t.at("n").get<std::size_t>();
    r.timing.cv_defined = t.at("cv_defined").get<bool>();
    r.questions = j.at("questions").get<std::size_t>();
    r.failed = j.at("failed").get<std::size_t>();
    r.skipped = j.at("skipped").get<std::size_t>();
    r.skip_report = j.at("skip_report").get<std::string>();
    for (const auto& o : j.at("outcomes")) {
      OutcomeIndexEntry e;
      e.question_id = o.at("question_id").get<std::string>();
      e.em = o.at("em").get<int>();
      e.anls = o.at("anls").get<double>();
      e.total_seconds = o.at("total_seconds").get<double>();
      e.failed_stage = o.value("failed_stage", "");
      r.outcomes.push_back(std::move(e));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("report: ") + e.what());
  }
}

ReportRow row_for(const EvalReport& report, std::string run_dir) {
  ReportRow row;
  row.run_dir = std::move(run_dir);
  row.complete = true;
  const auto& cfg = report.config;
  if (cfg.mode == RunMode::kBaseline) {
    row.model = cfg.model_id;
    row.cols = row.rows = row.margin = "*";
  } else {
    row.model = "EaGERS_" + std::to_string(cfg.grid.cell_count()) + "|" + percent_label(cfg.margin_fraction);
    row.cols = std::to_string(cfg.grid.cols);
    row.rows = std::to_string(cfg.grid.rows);
    row.margin = percent_label(cfg.margin_fraction) + "%";
  }
  row.em_percent = report.em_percent;
  row.anls_percent = report.anls_percent;
  row.avg_time = report.timing.mean_seconds;
  row.cv_percent = report.timing.cv_percent;
  return row;
}

ReportRow load_row(const std::filesystem::path& run_dir) {
  try {
    return row_for(report_from_json(read_file_text(run_dir / "report.json")), run_dir.string());
  } catch (const Error&) {
    ReportRow row;
    row.run_dir = run_dir.string();
    row.model = "incomplete";
    return row;
  }
}

std::vector<ReportRow> sort_rows(std::vector<ReportRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.complete != b.complete) return a.complete;
    return a.anls_percent > b.anls_percent;
  });
  return rows;
}

std::string render_table(const std::vector<ReportRow>& rows) {
  const std::vector<std::string> header = {"Model", "Cols", "Rows", "Margin", "EM (%)", "ANLS", "Avg Time (s)", "CV (%)"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    if (!r.complete) {
      cells.push_back({"incomplete", "-", "-", "-", "-", "-", "-", "-", r.run_dir});
      continue;
    }
    cells.push_back({r.model, r.cols, r.rows, r.margin, fixed2(r.em_percent), fixed2(r.anls_percent),
                     fixed2(r.avg_time), fixed2(r.cv_percent), r.run_dir});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& row, bool with_dir) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const bool left = c == 0;
      const std::string pad(width[c] - row[c].size(), ' ');
      out += left ? row[c] + pad : pad + row[c];
      out += c + 1 < header.size() ? "  " : "";
    }
    if (with_dir) out += "  " + row.back();
    return out + "\n";
  };
  std::string out = line(header, false);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out += std::string(total - 2, '-') + "\n";
  for (const auto& row : cells) out += line(row, true);
  return out;
}

std::string rows_to_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    if (!r.complete) {
      arr.push_back({{"run_dir", r.run_dir}, {"status", "incomplete"}});
      continue;
    }
    arr.push_back({{"run_dir", r.run_dir},
                   {"status", "complete"},
                   {"model", r.model},
                   {"cols", r.cols},
                   {"rows", r.rows},
                   {"margin", r.margin},
                   {"em_percent", r.em_percent},
                   {"anls_percent", r.anls_percent},
                   {"avg_time_seconds", r.avg_time},
                   {"cv_percent", r.cv_percent}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace eagers
