#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eagers/config.hpp"
#include "eagers/metrics.hpp"

namespace eagers {

struct OutcomeIndexEntry {
  std::string question_id;
  int em = 0;
  double anls = 0.0;
  double total_seconds = 0.0;
  std::string failed_stage;  // empty on success

  friend bool operator==(const OutcomeIndexEntry&, const OutcomeIndexEntry&) = default;
};

struct EvalReport {
  PipelineConfig config;
  std::string config_hash;
  double em_percent = 0.0;
  double anls = 0.0;
  double anls_percent = 0.0;
  TimingStats timing;
  std::size_t questions = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  std::string skip_report = "skipped.jsonl";  // relative to the run directory
  std::vector<OutcomeIndexEntry> outcomes;
};

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view json);

/// One line of the comparison table.
struct ReportRow {
  std::string run_dir;
  bool complete = false;
  std::string model;   // "EaGERS_50|15" or the model id for baseline runs
  std::string cols;    // "*" for baseline
  std::string rows;
  std::string margin;
  double em_percent = 0.0;
  double anls_percent = 0.0;
  double avg_time = 0.0;
  double cv_percent = 0.0;
};

ReportRow row_for(const EvalReport& report, std::string run_dir);
/// Reads <run_dir>/report.json; a missing or unreadable report yields an
/// incomplete row.
ReportRow load_row(const std::filesystem::path& run_dir);
/// Complete rows sorted by ANLS descending (stable), incomplete rows last.
std::vector<ReportRow> sort_rows(std::vector<ReportRow> rows);
std::string render_table(const std::vector<ReportRow>& rows);
std::string rows_to_json(const std::vector<ReportRow>& rows);

}  // namespace eagers
