#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "elicit/errors.hpp"
#include "elicit/survey.hpp"

using namespace elicit;

namespace {

TlxResponse with_winners(std::array<int, 6> ratings,
                         const std::function<TlxCategory(TlxCategory, TlxCategory)>& pick) {
  TlxResponse r;
  r.ratings = ratings;
  for (const auto& [a, b] : tlx_pairs()) r.pairwise_choices.push_back({a, b, pick(a, b)});
  return r;
}

TlxCategory first_wins(TlxCategory a, TlxCategory) { return a; }

}  // namespace

TEST(Tlx, PairsCoverAllFifteenCombinations) {
  const auto pairs = tlx_pairs();
  EXPECT_EQ(pairs.size(), kTlxPairCount);
  EXPECT_EQ(to_string(TlxCategory::frustration), "frustration");
  EXPECT_EQ(parse_tlx_category("Effort"), TlxCategory::effort);
  EXPECT_FALSE(parse_tlx_category("stress").has_value());
}

TEST(Tlx, AllZeroIsZero) {
  const auto s = score_tlx(with_winners({0, 0, 0, 0, 0, 0}, first_wins));
  EXPECT_EQ(s.overall, 0.0);
}

TEST(Tlx, AllTwentyIsExactlyOneHundred) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = score_tlx(with_winners({20, 20, 20, 20, 20, 20}, [&](TlxCategory a, TlxCategory b) {
      return rng() & 1 ? a : b;
    }));
    EXPECT_EQ(s.overall, 100.0);
  }
}

TEST(Tlx, MentalOnlyWorkloadIsOneThird) {
  std::mt19937_64 rng(2);
  const auto s = score_tlx(with_winners({20, 0, 0, 0, 0, 0}, [&](TlxCategory a, TlxCategory b) {
    if (a == TlxCategory::mental || b == TlxCategory::mental) return TlxCategory::mental;
    return rng() & 1 ? a : b;
  }));
  EXPECT_EQ(s.weights[0], 5);
  EXPECT_NEAR(s.overall, 100.0 * 5.0 / 15.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.per_category[0], 100.0);
}

TEST(Tlx, OverallIsConvexCombinationAndOrderInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> rating(0, 20);
  for (int trial = 0; trial < 500; ++trial) {
    std::array<int, 6> ratings{};
    for (auto& v : ratings) v = rating(rng);
    auto resp = with_winners(ratings, [&](TlxCategory a, TlxCategory b) { return rng() & 1 ? a : b; });
    const auto s = score_tlx(resp);
    int total = 0;
    for (int w : s.weights) total += w;
    EXPECT_EQ(total, 15);
    const auto [lo, hi] = std::minmax_element(s.per_category.begin(), s.per_category.end());
    EXPECT_GE(s.overall, *lo - 1e-12);
    EXPECT_LE(s.overall, *hi + 1e-12);

    std::shuffle(resp.pairwise_choices.begin(), resp.pairwise_choices.end(), rng);
    for (auto& c : resp.pairwise_choices) std::swap(c.first, c.second);
    const auto shuffled = score_tlx(resp);
    EXPECT_EQ(shuffled.overall, s.overall);
    EXPECT_EQ(shuffled.weights, s.weights);
  }
}

TEST(Tlx, MalformedPairSetListsProblems) {
  auto resp = with_winners({1, 2, 3, 4, 5, 6}, first_wins);
  resp.pairwise_choices.pop_back();
  resp.pairwise_choices.push_back(resp.pairwise_choices.front());
  try {
    score_tlx(resp);
    FAIL() << "expected an error";
  } catch (const AnalysisError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("missing"), std::string::npos) << msg;
    EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
    EXPECT_NE(msg.find("effort"), std::string::npos) << msg;
  }
  auto bad_winner = with_winners({1, 2, 3, 4, 5, 6}, first_wins);
  bad_winner.pairwise_choices[0].winner = TlxCategory::frustration;
  EXPECT_THROW(score_tlx(bad_winner), AnalysisError);
  auto bad_rating = with_winners({21, 2, 3, 4, 5, 6}, first_wins);
  EXPECT_THROW(score_tlx(bad_rating), AnalysisError);
}

TEST(Tlx, RawScoreIsUnweightedMean) {
  const auto s = score_raw_tlx({20, 10, 0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(s.overall, 25.0);
}

TEST(Likert, SingleRespondent) {
  const auto summary = summarize_likert({{3}}, {1, 5});
  const auto& q = summary.questions.at(0);
  EXPECT_EQ(q.mean, 3.0);
  EXPECT_EQ(q.median, 3.0);
  EXPECT_EQ(q.modes, std::vector<int>{3});
  EXPECT_EQ(q.sd, 0.0);
  EXPECT_EQ(q.histogram, (std::vector<std::size_t>{0, 0, 1, 0, 0}));
}

TEST(Likert, SampleStandardDeviation) {
  const auto q = summarize_likert({{1}, {5}}, {1, 5}).questions.at(0);
  EXPECT_DOUBLE_EQ(q.mean, 3.0);
  EXPECT_DOUBLE_EQ(q.median, 3.0);
  EXPECT_NEAR(q.sd, 2.8284271247461903, 1e-12);
}

TEST(Likert, TiedModesAreAllReported) {
  const auto q = summarize_likert({{2}, {2}, {4}, {4}}, {1, 5}).questions.at(0);
  EXPECT_EQ(q.modes, (std::vector<int>{2, 4}));
  std::size_t total = 0;
  for (auto c : q.histogram) total += c;
  EXPECT_EQ(total, 4u);
}

TEST(Likert, ArbitraryScalesAndErrors) {
  const auto q = summarize_likert({{0}, {2}, {5}}, {0, 5}).questions.at(0);
  EXPECT_EQ(q.histogram.size(), 6u);
  EXPECT_THROW(summarize_likert({}, {1, 5}), AnalysisError);
  EXPECT_THROW(summarize_likert({{6}}, {1, 5}), AnalysisError);
  EXPECT_THROW(summarize_likert({{1, 2}, {1}}, {1, 5}), AnalysisError);
}

TEST(Welch, KnownValues) {
  const std::vector<double> a{27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4};
  const std::vector<double> b{27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4};
  const auto r = welch_t_test(a, b);
  EXPECT_NEAR(r.t, -2.46, 0.01);
  EXPECT_NEAR(r.df, 24.99, 0.01);
  EXPECT_NEAR(r.p_two_sided, 0.021, 0.001);
  EXPECT_THROW(welch_t_test(std::vector<double>{1}, b), AnalysisError);
}
