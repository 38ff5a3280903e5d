#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eagers {

inline constexpr double kDefaultAnlsThreshold = 0.5;

struct AnswerJudgment {
  int em = 0;
  double anls_score = 0.0;
  int best_reference = 0;

  friend bool operator==(const AnswerJudgment&, const AnswerJudgment&) = default;
};

struct TimingStats {
  double mean_seconds = 0.0;
  double cv_percent = 0.0;
  std::size_t n = 0;
  // False when the mean is zero and the CV is therefore undefined (reported as 0).
  bool cv_defined = true;

  friend bool operator==(const TimingStats&, const TimingStats&) = default;
};

struct AggregateScores {
  double em_percent = 0.0;
  double anls = 0.0;          // 0..1
  double anls_percent = 0.0;  // 0..100
  TimingStats timing;
};

/// Decodes UTF-8 into Unicode scalar values. Malformed sequences decode to U+FFFD.
std::u32string utf8_to_scalars(std::string_view text);
std::string scalars_to_utf8(std::u32string_view text);

/// Lowercase, trim, and collapse internal whitespace runs to one space.
std::u32string normalize_answer(std::string_view text);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

double normalized_similarity(std::string_view a, std::string_view b);

double anls_single(std::string_view prediction, std::span<const std::string> references,
                   double threshold = kDefaultAnlsThreshold);

/// 1 iff the prediction equals a reference. With `raw` set the strings are
/// compared byte-for-byte; otherwise both sides are normalized first.
int exact_match(std::string_view prediction, std::span<const std::string> references,
                bool raw = false);

AnswerJudgment judge(std::string_view prediction, std::span<const std::string> references,
                     double threshold = kDefaultAnlsThreshold, bool raw_em = false);

/// Mean and population coefficient of variation.
TimingStats timing_stats(std::span<const double> seconds);

AggregateScores aggregate(std::span<const AnswerJudgment> judgments, std::span<const double> timings);

}  // namespace eagers
