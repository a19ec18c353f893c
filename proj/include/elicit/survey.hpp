#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace elicit {

// NASA Task Load Index.

enum class TlxCategory : std::size_t {
  mental = 0,
  physical,
  temporal,
  performance,
  effort,
  frustration,
};

inline constexpr std::size_t kTlxCategoryCount = 6;
inline constexpr std::size_t kTlxPairCount = 15;
inline constexpr int kTlxMaxRating = 20;  // 21-segment scale, 0..20

std::string_view to_string(TlxCategory c);
std::optional<TlxCategory> parse_tlx_category(std::string_view text);

struct TlxPairChoice {
  TlxCategory first;
  TlxCategory second;
  TlxCategory winner;
};

struct TlxResponse {
  std::array<int, kTlxCategoryCount> ratings{};
  std::vector<TlxPairChoice> pairwise_choices;
};

struct TlxScore {
  std::array<double, kTlxCategoryCount> per_category{};  // 0..100
  std::array<int, kTlxCategoryCount> weights{};           // tallies, sum 15
  double overall = 0.0;
};

// All 15 unordered category pairs in canonical (first < second) order.
std::vector<std::pair<TlxCategory, TlxCategory>> tlx_pairs();

// Weighted TLX. Throws AnalysisError for ratings outside 0..20 or a
// pairwise set that does not cover each pair exactly once; the message lists
// the missing and duplicated pairs.
TlxScore score_tlx(const TlxResponse& response);

// Raw (unweighted) TLX: mean of the six scaled ratings. weights are zero.
TlxScore score_raw_tlx(const std::array<int, kTlxCategoryCount>& ratings);

// Likert-style questionnaires.

struct LikertScale {
  int min = 1;
  int max = 5;
};

struct QuestionSummary {
  std::size_t respondents = 0;
  double mean = 0.0;
  double median = 0.0;
  std::vector<int> modes;  // every value sharing the highest count, ascending
  double sd = 0.0;         // sample (n - 1); 0 for a single respondent
  std::vector<std::size_t> histogram;  // index 0 is scale.min
};

struct LikertSummary {
  LikertScale scale;
  std::vector<QuestionSummary> questions;
};

// responses[r][q] is respondent r's rating for question q. Throws on empty
// input, ragged rows or ratings outside the scale.
LikertSummary summarize_likert(const std::vector<std::vector<int>>& responses,
                               LikertScale scale);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
};

// Welch's unequal-variance t-test; each sample needs >= 2 values.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace elicit
