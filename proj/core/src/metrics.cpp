#include "eagers/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eagers/error.hpp"

namespace eagers {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

// Simple case folding for Latin, Greek and Cyrillic; other scripts pass through.
char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if ((c >= 0xC0 && c <= 0xDE && c != 0xD7)) return c + 32;
  if (c == 0x178) return 0xFF;
  if (c >= 0x100 && c <= 0x17F && c != 0x130 && c != 0x131 && c != 0x138 && c != 0x149 && c != 0x17F) {
    // Latin Extended-A alternates upper/lower, with a phase shift in 0x139..0x148 and 0x179..0x17E.
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (odd_upper ? (c % 2 == 1) : (c % 2 == 0)) return c + 1;
    return c;
  }
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

void check_references(std::span<const std::string> references) {
  if (references.empty()) {
    throw Error(ErrorKind::kInvalidReference, "at least one reference answer is required");
  }
}

double similarity_normalized(const std::u32string& a, const std::u32string& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

}  // namespace

std::u32string utf8_to_scalars(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    int len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = i + static_cast<std::size_t>(len) <= text.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

std::string scalars_to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) append_utf8(out, c);
  return out;
}

std::u32string normalize_answer(std::string_view text) {
  const auto scalars = utf8_to_scalars(text);
  std::u32string out;
  out.reserve(scalars.size());
  bool pending_space = false;
  for (char32_t c : scalars) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(to_lower(c));
  }
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(utf8_to_scalars(a), utf8_to_scalars(b));
}

double normalized_similarity(std::string_view a, std::string_view b) {
  return similarity_normalized(normalize_answer(a), normalize_answer(b));
}

double anls_single(std::string_view prediction, std::span<const std::string> references,
                   double threshold) {
  return judge(prediction, references, threshold).anls_score;
}

int exact_match(std::string_view prediction, std::span<const std::string> references, bool raw) {
  check_references(references);
  if (raw) {
    return std::any_of(references.begin(), references.end(),
                       [&](const std::string& r) { return r == prediction; })
               ? 1
               : 0;
  }
  const auto p = normalize_answer(prediction);
  return std::any_of(references.begin(), references.end(),
                     [&](const std::string& r) { return normalize_answer(r) == p; })
             ? 1
             : 0;
}

AnswerJudgment judge(std::string_view prediction, std::span<const std::string> references,
                     double threshold, bool raw_em) {
  check_references(references);
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kPrecondition, "ANLS threshold must be in [0, 1]");
  }
  const auto p = normalize_answer(prediction);
  AnswerJudgment j;
  double best = -1.0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const double s = similarity_normalized(p, normalize_answer(references[i]));
    if (s > best) {
      best = s;
      j.best_reference = static_cast<int>(i);
    }
  }
  j.anls_score = best >= threshold ? best : 0.0;
  j.em = exact_match(prediction, references, raw_em);
  return j;
}

TimingStats timing_stats(std::span<const double> seconds) {
  TimingStats t;
  t.n = seconds.size();
  if (seconds.empty()) {
    t.cv_defined = false;
    return t;
  }
  const double n = static_cast<double>(seconds.size());
  const double mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : seconds) ss += (s - mean) * (s - mean);
  t.mean_seconds = mean;
  if (mean > 0.0) {
    t.cv_percent = 100.0 * std::sqrt(ss / n) / mean;
  } else {
    t.cv_percent = 0.0;
    t.cv_defined = false;
  }
  return t;
}

AggregateScores aggregate(std::span<const AnswerJudgment> judgments, std::span<const double> timings) {
  if (judgments.empty() || timings.empty()) {
    throw Error(ErrorKind::kEmptyRun, "cannot aggregate an empty run");
  }
  AggregateScores out;
  double em = 0.0;
  double anls = 0.0;
  for (const auto& j : judgments) {
    em += j.em;
    anls += j.anls_score;
  }
  const double n = static_cast<double>(judgments.size());
  out.em_percent = 100.0 * em / n;
  out.anls = anls / n;
  out.anls_percent = 100.0 * out.anls;
  out.timing = timing_stats(timings);
  return out;
}

}  // namespace eagers
