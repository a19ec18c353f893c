#include "elicit/survey.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

constexpr std::array<std::string_view, kTlxCategoryCount> kTlxNames = {
    "mental", "physical", "temporal", "performance", "effort", "frustration"};

std::size_t idx(TlxCategory c) { return static_cast<std::size_t>(c); }

std::string pair_name(std::size_t a, std::size_t b) {
  return std::string(kTlxNames[a]) + "/" + std::string(kTlxNames[b]);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

std::string_view to_string(TlxCategory c) { return kTlxNames[idx(c)]; }

std::optional<TlxCategory> parse_tlx_category(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < kTlxCategoryCount; ++i) {
    if (kTlxNames[i] == lower) return static_cast<TlxCategory>(i);
  }
  return std::nullopt;
}

std::vector<std::pair<TlxCategory, TlxCategory>> tlx_pairs() {
  std::vector<std::pair<TlxCategory, TlxCategory>> out;
  for (std::size_t a = 0; a < kTlxCategoryCount; ++a) {
    for (std::size_t b = a + 1; b < kTlxCategoryCount; ++b) {
      out.emplace_back(static_cast<TlxCategory>(a), static_cast<TlxCategory>(b));
    }
  }
  return out;
}

TlxScore score_raw_tlx(const std::array<int, kTlxCategoryCount>& ratings) {
  TlxScore score;
  double sum = 0.0;
  for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
    if (ratings[c] < 0 || ratings[c] > kTlxMaxRating) {
      throw AnalysisError("TLX rating for " + std::string(kTlxNames[c]) + " is " +
                          std::to_string(ratings[c]) + ", expected 0..20");
    }
    score.per_category[c] = 5.0 * ratings[c];
    sum += score.per_category[c];
  }
  score.overall = sum / static_cast<double>(kTlxCategoryCount);
  return score;
}

TlxScore score_tlx(const TlxResponse& response) {
  TlxScore score = score_raw_tlx(response.ratings);

  std::array<std::array<int, kTlxCategoryCount>, kTlxCategoryCount> seen{};
  std::vector<std::string> problems;
  for (const auto& choice : response.pairwise_choices) {
    std::size_t a = idx(choice.first);
    std::size_t b = idx(choice.second);
    if (a == b) {
      problems.push_back("pair " + pair_name(a, b) + " compares a category with itself");
      continue;
    }
    if (a > b) std::swap(a, b);
    if (idx(choice.winner) != a && idx(choice.winner) != b) {
      problems.push_back("winner " + std::string(kTlxNames[idx(choice.winner)]) +
                         " is not part of pair " + pair_name(a, b));
      continue;
    }
    ++seen[a][b];
    ++score.weights[idx(choice.winner)];
  }
  for (std::size_t a = 0; a < kTlxCategoryCount; ++a) {
    for (std::size_t b = a + 1; b < kTlxCategoryCount; ++b) {
      if (seen[a][b] == 0) problems.push_back("missing pair " + pair_name(a, b));
      if (seen[a][b] > 1) problems.push_back("duplicate pair " + pair_name(a, b));
    }
  }
  if (!problems.empty()) {
    std::string message = "malformed TLX pairwise comparisons:";
    for (const auto& p : problems) message += " " + p + ";";
    message.pop_back();
    throw AnalysisError(message);
  }

  double weighted = 0.0;
  for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
    weighted += score.per_category[c] * score.weights[c];
  }
  score.overall = weighted / static_cast<double>(kTlxPairCount);
  return score;
}

LikertSummary summarize_likert(const std::vector<std::vector<int>>& responses,
                               LikertScale scale) {
  if (scale.max < scale.min) throw AnalysisError("Likert scale max is below min");
  if (responses.empty() || responses.front().empty()) {
    throw AnalysisError("no Likert responses");
  }
  const std::size_t questions = responses.front().size();
  for (std::size_t r = 0; r < responses.size(); ++r) {
    if (responses[r].size() != questions) {
      throw AnalysisError("respondent " + std::to_string(r) + " answered " +
                          std::to_string(responses[r].size()) + " questions, expected " +
                          std::to_string(questions));
    }
    for (int v : responses[r]) {
      if (v < scale.min || v > scale.max) {
        throw AnalysisError("rating " + std::to_string(v) + " outside scale " +
                            std::to_string(scale.min) + ".." + std::to_string(scale.max));
      }
    }
  }

  LikertSummary summary;
  summary.scale = scale;
  const auto bins = static_cast<std::size_t>(scale.max - scale.min + 1);
  for (std::size_t q = 0; q < questions; ++q) {
    QuestionSummary s;
    std::vector<double> values;
    values.reserve(responses.size());
    s.histogram.assign(bins, 0);
    for (const auto& row : responses) {
      values.push_back(row[q]);
      ++s.histogram[static_cast<std::size_t>(row[q] - scale.min)];
    }
    s.respondents = values.size();
    s.mean = mean_of(values);
    s.sd = values.size() > 1 ? std::sqrt(sample_variance(values, s.mean)) : 0.0;

    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);

    const std::size_t top = *std::max_element(s.histogram.begin(), s.histogram.end());
    for (std::size_t b = 0; b < bins; ++b) {
      if (s.histogram[b] == top) s.modes.push_back(scale.min + static_cast<int>(b));
    }
    summary.questions.push_back(std::move(s));
  }
  return summary;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw AnalysisError("Welch t-test needs at least 2 values per sample");
  }
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_variance(a, ma) / static_cast<double>(a.size());
  const double vb = sample_variance(b, mb) / static_cast<double>(b.size());
  const double se2 = va + vb;
  if (!(se2 > 0.0)) throw AnalysisError("Welch t-test: both samples have zero variance");

  WelchResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  const boost::math::students_t dist(r.df);
  r.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

}  // namespace elicit
