#pragma once

#include <cstddef>
#include <span>

namespace elicit {

// c(x) = lower + (upper - lower) / (1 + exp(-steepness * (x - midpoint)))
struct LogisticParams {
  double lower = 0.0;
  double upper = 0.0;
  double midpoint = 0.0;
  double steepness = 0.0;

  double operator()(double x) const;
};

// Lack-of-fit check: residual variance rss/(n-4) against the sample variance
// of the observations, F(n-4, n-1), upper tail. The fit is accepted when the
// residual variance is not significantly larger, i.e. p >= alpha.
struct FitTest {
  double f_statistic = 0.0;
  std::size_t df_residual = 0;
  std::size_t df_reference = 0;
  double p_value = 0.0;
  double alpha = 0.05;
  bool accepted = false;
};

struct LogisticFit {
  LogisticParams params;
  double rss = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // Flat data: lower == upper, steepness and midpoint carry no information.
  bool degenerate = false;
  FitTest test;
};

struct LogisticFitOptions {
  std::size_t max_iterations = 500;
  double alpha = 0.05;
};

// Least-squares fit: coarse (midpoint, steepness) grid with the asymptotes
// solved linearly at each node, then damped Gauss-Newton on all four
// parameters. Never throws for numerical trouble; non-convergence is
// reported through `converged` with the best parameters seen.
// Throws AnalysisError when fewer than 4 samples or sizes differ.
LogisticFit fit_logistic(std::span<const double> x, std::span<const double> y,
                         const LogisticFitOptions& opts = {});

}  // namespace elicit
