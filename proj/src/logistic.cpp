#include "elicit/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

constexpr std::size_t kMidpointNodes = 41;
constexpr std::size_t kSteepnessNodes = 40;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double rss_of(const LogisticParams& p, std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - p(x[i]);
    s += r * r;
  }
  return s;
}

// For fixed (midpoint, steepness) the model is linear in the asymptotes:
// y = lower + (upper - lower) * s. Solve that regression in closed form.
bool solve_asymptotes(double midpoint, double steepness, std::span<const double> x,
                      std::span<const double> y, LogisticParams& out) {
  const double n = static_cast<double>(x.size());
  double ss = 0.0, sy = 0.0, sss = 0.0, ssy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = sigmoid(steepness * (x[i] - midpoint));
    ss += s;
    sy += y[i];
    sss += s * s;
    ssy += s * y[i];
  }
  const double var = sss - ss * ss / n;
  if (!(var > 1e-12 * n)) return false;
  const double slope = (ssy - ss * sy / n) / var;
  const double intercept = (sy - slope * ss) / n;
  out = LogisticParams{intercept, intercept + slope, midpoint, steepness};
  return true;
}

// Residual variance against a difference-based noise estimate: mean squared
// successive difference over 2, samples ordered by x.
FitTest lack_of_fit(double rss, std::span<const double> x, std::span<const double> y,
                    double alpha) {
  FitTest t;
  t.alpha = alpha;
  const std::size_t n = y.size();
  t.df_residual = n > 4 ? n - 4 : 0;
  t.df_reference = n - 1;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  double ss_diff = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = y[order[i]] - y[order[i - 1]];
    ss_diff += d * d;
  }

  if (t.df_residual == 0) {
    t.f_statistic = std::numeric_limits<double>::quiet_NaN();
    t.p_value = std::numeric_limits<double>::quiet_NaN();
    t.accepted = false;
    return t;
  }
  const double residual_var = rss / static_cast<double>(t.df_residual);
  const double reference_var = ss_diff / (2.0 * static_cast<double>(t.df_reference));
  if (!(reference_var > 0.0)) {
    // Flat observations: only an exact fit is adequate.
    t.f_statistic = residual_var > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    t.p_value = residual_var > 0.0 ? 0.0 : 1.0;
  } else {
    t.f_statistic = residual_var / reference_var;
    const boost::math::fisher_f dist(static_cast<double>(t.df_residual),
                                     static_cast<double>(t.df_reference));
    t.p_value = boost::math::cdf(boost::math::complement(dist, t.f_statistic));
  }
  t.accepted = t.p_value >= alpha;
  return t;
}

}  // namespace

double LogisticParams::operator()(double x) const {
  return lower + (upper - lower) * sigmoid(steepness * (x - midpoint));
}

LogisticFit fit_logistic(std::span<const double> x, std::span<const double> y,
                         const LogisticFitOptions& opts) {
  if (x.size() != y.size()) throw AnalysisError("fit_logistic: x and y sizes differ");
  if (x.size() < 4) throw AnalysisError("fit_logistic: at least 4 samples are required");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw AnalysisError("fit_logistic: non-finite sample");
    }
  }

  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double xmin = *xmin_it;
  const double span = *xmax_it - xmin;
  const double yscale = std::max({1.0, std::abs(*ymin_it), std::abs(*ymax_it)});

  LogisticFit fit;
  if (*ymax_it - *ymin_it <= 1e-12 * yscale || !(span > 0.0)) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    fit.params = LogisticParams{mean, mean, xmin + 0.5 * span, 0.0};
    fit.rss = rss_of(fit.params, x, y);
    fit.degenerate = true;
    fit.converged = false;
    fit.test = lack_of_fit(fit.rss, x, y, opts.alpha);
    return fit;
  }

  // Coarse grid: midpoint over the sampled range padded by a quarter on each
  // side; steepness log-spaced, transition width from ~1/1000 of the range
  // to ~10x the range.
  LogisticParams best;
  double best_rss = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < kMidpointNodes; ++a) {
    const double midpoint = xmin - 0.25 * span +
                            1.5 * span * static_cast<double>(a) / (kMidpointNodes - 1);
    for (std::size_t b = 0; b < kSteepnessNodes; ++b) {
      const double exponent = -1.0 + 4.0 * static_cast<double>(b) / (kSteepnessNodes - 1);
      const double steepness = std::pow(10.0, exponent) / span;
      LogisticParams candidate;
      if (!solve_asymptotes(midpoint, steepness, x, y, candidate)) continue;
      const double r = rss_of(candidate, x, y);
      if (r < best_rss) {
        best_rss = r;
        best = candidate;
      }
    }
  }
  if (!std::isfinite(best_rss)) {
    best = LogisticParams{*ymin_it, *ymax_it, xmin + 0.5 * span, 4.0 / span};
    best_rss = rss_of(best, x, y);
  }

  // Damped Gauss-Newton (Marquardt scaling of the normal equations).
  const std::size_t n = x.size();
  Eigen::MatrixXd jac(n, 4);
  Eigen::VectorXd resid(n);
  Eigen::Vector4d theta(best.lower, best.upper, best.midpoint, best.steepness);
  double current = best_rss;
  double lambda = 1e-3;
  bool converged = false;
  const double exact_floor = 1e-26 * yscale * yscale * static_cast<double>(n);
  std::size_t iter = 0;

  for (; iter < opts.max_iterations && !converged; ++iter) {
    if (current <= exact_floor) {
      converged = true;
      break;
    }
    const LogisticParams p{theta[0], theta[1], theta[2], theta[3]};
    for (std::size_t i = 0; i < n; ++i) {
      const double s = sigmoid(p.steepness * (x[i] - p.midpoint));
      const double ds = (p.upper - p.lower) * s * (1.0 - s);
      jac(i, 0) = 1.0 - s;
      jac(i, 1) = s;
      jac(i, 2) = -p.steepness * ds;
      jac(i, 3) = (x[i] - p.midpoint) * ds;
      resid[i] = y[i] - p(x[i]);
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d grad = jac.transpose() * resid;

    bool improved = false;
    while (!improved) {
      Eigen::Matrix4d damped = jtj;
      for (int d = 0; d < 4; ++d) damped(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      const Eigen::Vector4d step = damped.ldlt().solve(grad);
      const Eigen::Vector4d trial = theta + step;
      const LogisticParams tp{trial[0], trial[1], trial[2], trial[3]};
      const double r = step.allFinite() ? rss_of(tp, x, y)
                                        : std::numeric_limits<double>::infinity();
      if (r < current) {
        const double drop = current - r;
        theta = trial;
        current = r;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        const double rel_step = (step.array().abs() /
                                 (theta.array().abs() + 1e-12)).maxCoeff();
        if (rel_step < 1e-12 || drop <= 1e-15 * r) converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) {
          // No descent direction left at working precision: stationary point.
          converged = true;
          break;
        }
      }
    }
  }

  LogisticParams p{theta[0], theta[1], theta[2], theta[3]};
  if (p.steepness < 0.0) {
    std::swap(p.lower, p.upper);
    p.steepness = -p.steepness;
  }
  fit.params = p;
  fit.rss = current;
  fit.iterations = iter;
  fit.converged = converged && p.steepness > 0.0 && p.lower <= p.upper;
  fit.test = lack_of_fit(fit.rss, x, y, opts.alpha);
  return fit;
}

}  // namespace elicit
