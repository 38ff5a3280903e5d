#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eagers/backends.hpp"
#include "eagers/geometry.hpp"
#include "eagers/imaging.hpp"
#include "eagers/metrics.hpp"

namespace eagers {

enum class RunMode { kEagers, kBaseline };

std::string_view to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);

struct PipelineConfig {
  RunMode mode = RunMode::kEagers;
  GridSpec grid{5, 5};
  double margin_fraction = 0.0;
  int max_side = kDefaultMaxSide;
  double anls_threshold = kDefaultAnlsThreshold;
  std::vector<std::string> embedder_ids = kDefaultEmbedderIds;
  std::string model_id = kDefaultModelId;
  std::string explain_prompt_id = kDefaultExplainPrompt;
  std::string answer_prompt_id = kDefaultAnswerPrompt;
  bool raw_em = false;
  // Not part of the config hash: they change how a run executes, not what it computes.
  int concurrency = 4;
  bool write_masked = false;

  void validate() const;
};

struct RunConfig {
  PipelineConfig pipeline;
  BackendConfig backend;
};

/// Canonical JSON of the hashed PipelineConfig fields (sorted keys, no
/// whitespace). Two configs with equal canonical text are comparable runs.
std::string canonical_config_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(std::string_view json);

/// First 16 hex digits of SHA-256 over canonical_config_json.
std::string config_hash(const PipelineConfig& cfg);

/// Parses a flat TOML document whose keys mirror PipelineConfig and
/// BackendConfig, applied on top of `base`. Throws Error(kConfig).
RunConfig parse_config_toml(std::string_view text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Built-in presets: eagers_25_0, eagers_50_0, eagers_25_15, eagers_50_15, baseline.
std::vector<std::string> preset_names();
RunConfig preset(std::string_view name);

/// Prompt ids look like "<name>_v<N>".
bool valid_prompt_id(std::string_view id);

}  // namespace eagers
