#include "elicit/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "elicit/agreement.hpp"
#include "elicit/detail/parallel.hpp"
#include "elicit/errors.hpp"

namespace elicit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64's output sequence is fixed by the standard; the bit-to-double
// mapping is done here so draws are identical across standard libraries.
double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> category_probabilities(const NullModel& model) {
  if (model.participant_count < 2) throw AnalysisError("null model needs N >= 2");
  if (model.category_count < 1) throw AnalysisError("null model needs q >= 1");
  const std::size_t q = model.category_count;

  return std::visit(
      [q](const auto& d) -> std::vector<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformCategories>) {
          return std::vector<double>(q, 1.0 / static_cast<double>(q));
        } else if constexpr (std::is_same_v<T, ZipfCategories>) {
          if (!(d.exponent >= 0.0)) throw AnalysisError("zipf exponent must be >= 0");
          std::vector<double> w(q);
          for (std::size_t k = 0; k < q; ++k) {
            w[k] = 1.0 / std::pow(static_cast<double>(k + 1), d.exponent);
          }
          const double total = std::accumulate(w.begin(), w.end(), 0.0);
          for (auto& v : w) v /= total;
          return w;
        } else {
          if (d.weights.size() != q) {
            throw AnalysisError("empirical weights: expected " + std::to_string(q) +
                                " values, got " + std::to_string(d.weights.size()));
          }
          double total = 0.0;
          for (double v : d.weights) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
              throw AnalysisError("empirical weights must be finite and non-negative");
            }
            total += v;
          }
          if (std::abs(total - 1.0) > 1e-9) {
            throw AnalysisError("empirical weights must sum to 1");
          }
          return d.weights;
        }
      },
      model.distribution);
}

double expected_agreement_rate(const NullModel& model) {
  double s = 0.0;
  for (double p : category_probabilities(model)) s += p * p;
  return s;
}

NullDistribution simulate_null(const NullModel& model, std::size_t draws, std::size_t threads) {
  if (draws == 0) throw AnalysisError("simulation needs at least one draw");
  const auto probs = category_probabilities(model);
  std::vector<double> cumulative(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());
  cumulative.back() = 1.0;
  const std::size_t q = probs.size();
  const std::size_t n = model.participant_count;

  NullDistribution dist;
  dist.samples.resize(draws);
  detail::parallel_for(
      draws,
      [&](std::size_t d) {
        std::mt19937_64 rng(splitmix64(model.seed ^ splitmix64(d)));
        std::vector<std::size_t> sizes(q, 0);
        for (std::size_t p = 0; p < n; ++p) {
          const double u = unit_interval(rng);
          const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
          const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), q - 1);
          ++sizes[k];
        }
        dist.samples[d] = agreement_rate(sizes);
      },
      threads);

  const double count = static_cast<double>(draws);
  dist.mean = std::accumulate(dist.samples.begin(), dist.samples.end(), 0.0) / count;
  if (draws > 1) {
    double ss = 0.0;
    for (double v : dist.samples) ss += (v - dist.mean) * (v - dist.mean);
    dist.variance = ss / (count - 1.0);
  }
  std::vector<double> sorted = dist.samples;
  std::sort(sorted.begin(), sorted.end());
  dist.q90 = quantile_sorted(sorted, 0.90);
  dist.q95 = quantile_sorted(sorted, 0.95);
  dist.q99 = quantile_sorted(sorted, 0.99);
  return dist;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw AnalysisError("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double p_value(double observed_ar, const NullDistribution& dist) {
  if (dist.samples.empty()) throw AnalysisError("p_value: empty null distribution");
  const auto at_least = std::count_if(dist.samples.begin(), dist.samples.end(),
                                      [observed_ar](double v) { return v >= observed_ar; });
  return static_cast<double>(at_least + 1) / static_cast<double>(dist.samples.size() + 1);
}

}  // namespace elicit
