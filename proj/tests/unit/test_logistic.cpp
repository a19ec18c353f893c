#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "elicit/errors.hpp"
#include "elicit/logistic.hpp"

using namespace elicit;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Logistic, EvaluatesCurve) {
  const LogisticParams p{10, 90, 2, 3};
  EXPECT_DOUBLE_EQ(p(2.0), 50.0);
  EXPECT_NEAR(p(100.0), 90.0, 1e-9);
  EXPECT_NEAR(p(-100.0), 10.0, 1e-9);
}

TEST(Logistic, RecoversNoiselessParameters) {
  const LogisticParams truth{5.0, 95.0, 1.0, 2.0};
  const auto x = linspace(-2.0, 4.0, 50);
  std::vector<double> y;
  for (double v : x) y.push_back(truth(v));
  const auto fit = fit_logistic(x, y);
  EXPECT_TRUE(fit.converged);
  EXPECT_FALSE(fit.degenerate);
  EXPECT_LT(rel(fit.params.lower, truth.lower), 1e-3);
  EXPECT_LT(rel(fit.params.upper, truth.upper), 1e-3);
  EXPECT_LT(rel(fit.params.midpoint, truth.midpoint), 1e-3);
  EXPECT_LT(rel(fit.params.steepness, truth.steepness), 1e-3);
  EXPECT_LT(fit.rss, 1e-8);
  EXPECT_TRUE(fit.test.accepted);
}

TEST(Logistic, DecreasingDataIsReparameterized) {
  const LogisticParams truth{0.0, 100.0, 3.0, 1.5};
  const auto x = linspace(0.0, 6.0, 40);
  std::vector<double> y;
  for (double v : x) y.push_back(100.0 - truth(v));
  const auto fit = fit_logistic(x, y);
  // Positive steepness with the left asymptote above the right one.
  EXPECT_GT(fit.params.steepness, 0.0);
  EXPECT_NEAR(fit.params.lower, 100.0, 1e-3);
  EXPECT_NEAR(fit.params.upper, 0.0, 1e-3);
  EXPECT_NEAR(fit.params.midpoint, 3.0, 1e-3);
  EXPECT_LT(fit.rss, 1e-6);
  EXPECT_FALSE(fit.converged);
}

TEST(Logistic, FlatSamplesAreDegenerate) {
  const auto x = linspace(0.0, 1.0, 20);
  const std::vector<double> y(20, 100.0);
  const auto fit = fit_logistic(x, y);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_FALSE(fit.converged);
  EXPECT_NEAR(fit.params.lower, 100.0, 1e-9);
  EXPECT_NEAR(fit.params.upper, 100.0, 1e-9);
}

TEST(Logistic, NoisySamplesStayWithinResidualBound) {
  const LogisticParams truth{0.0, 100.0, 1.0, 2.0};
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto x = linspace(-2.0, 4.0, 50);
  std::vector<double> y;
  for (double v : x) y.push_back(truth(v) + noise(rng));
  const auto fit = fit_logistic(x, y);
  EXPECT_TRUE(fit.converged);
  EXPECT_LE(fit.rss, static_cast<double>(x.size()) * 4.0);
  EXPECT_NEAR(fit.params.midpoint, 1.0, 0.05);
  EXPECT_EQ(fit.test.df_residual, x.size() - 4);
  EXPECT_EQ(fit.test.df_reference, x.size() - 1);
  EXPECT_TRUE(fit.test.accepted);
  EXPECT_GE(fit.test.p_value, 0.05);
}

TEST(Logistic, PoorFitIsNotAccepted) {
  // A symmetric bump has no logistic shape.
  const auto x = linspace(-3.0, 3.0, 41);
  std::vector<double> y;
  for (double v : x) y.push_back(100.0 * std::exp(-v * v));
  const auto fit = fit_logistic(x, y);
  EXPECT_FALSE(fit.test.accepted);
  EXPECT_LT(fit.test.p_value, 0.05);
}

TEST(Logistic, RejectsBadInput) {
  const std::vector<double> x{0, 1, 2};
  EXPECT_THROW(fit_logistic(x, x), AnalysisError);
  const std::vector<double> a{0, 1, 2, 3}, b{0, 1, 2};
  EXPECT_THROW(fit_logistic(a, b), AnalysisError);
  const std::vector<double> c{0, 1, NAN, 3};
  EXPECT_THROW(fit_logistic(a, c), AnalysisError);
}
