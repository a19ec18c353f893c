#pragma once

// Null distribution of the agreement rate when N participants pick among q
// categories at random. Used to turn an observed AR into an empirical
// p-value and to derive significance thresholds for a given (N, q).

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace elicit {

struct UniformCategories {};

// P(k) proportional to 1 / k^s for ranks k = 1..q.
struct ZipfCategories {
  double exponent = 1.0;
};

// Explicit per-category probabilities; must sum to 1.
struct EmpiricalCategories {
  std::vector<double> weights;
};

using CategoryDistribution = std::variant<UniformCategories, ZipfCategories, EmpiricalCategories>;

struct NullModel {
  std::size_t participant_count = 20;
  std::size_t category_count = 10;
  CategoryDistribution distribution = UniformCategories{};
  std::uint64_t seed = 0;
};

struct NullDistribution {
  std::vector<double> samples;  // one AR per draw, in draw order
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1)
  double q90 = 0.0;
  double q95 = 0.0;
  double q99 = 0.0;
};

// Category probabilities implied by the model (validated).
std::vector<double> category_probabilities(const NullModel& model);

// Each draw uses its own generator seeded from (seed, draw index), so the
// result does not depend on `threads` (0 = hardware concurrency).
NullDistribution simulate_null(const NullModel& model, std::size_t draws,
                               std::size_t threads = 0);

// Add-one upper-tail estimate: (#{samples >= observed} + 1) / (draws + 1).
double p_value(double observed_ar, const NullDistribution& dist);

// Linear-interpolated sample quantile (p in [0,1]) of sorted values.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Expected AR under the model: sum_k p_k^2 (the probability that two
// independent participants pick the same category).
double expected_agreement_rate(const NullModel& model);

}  // namespace elicit
