#pragma once

// Dissimilarity-consensus over motion trajectories.
//
// Two proposals are similar at tolerance tau when their dissimilarity is at
// most tau. C_R(tau) is the percentage of participant pairs that are similar.
// For production studies (several trials per participant) the trial-by-trial
// dissimilarities of a pair are first collapsed with an aggregator zeta.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "elicit/core.hpp"
#include "elicit/logistic.hpp"
#include "elicit/trajectory.hpp"

namespace elicit {

struct TrajectoryKey {
  ParticipantId participant;
  std::size_t trial = 0;

  auto operator<=>(const TrajectoryKey&) const = default;
};

// Symmetric, zero-diagonal, finite and non-negative by construction through
// the factory functions; the constructor checks those invariants.
class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;
  // values is row-major size() x size(). Throws AnalysisError on invariant
  // violations.
  DissimilarityMatrix(ReferentId referent, std::vector<TrajectoryKey> order,
                      std::vector<double> values);

  const ReferentId& referent() const noexcept { return referent_; }
  const std::vector<TrajectoryKey>& order() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * order_.size() + j]; }
  std::span<const double> values() const noexcept { return values_; }
  double max_value() const noexcept;

  // Distinct participants in first-appearance order.
  std::vector<ParticipantId> participants() const;

 private:
  ReferentId referent_;
  std::vector<TrajectoryKey> order_;
  std::vector<double> values_;
};

// Builds the pairwise DTW matrix. Trajectories must all belong to the same
// referent and should already be preprocessed with one shared config.
DissimilarityMatrix dissimilarity_matrix(std::span<const Trajectory> trajectories,
                                         const DtwOptions& opts = {});

enum class Zeta { min, max, avg };

std::string_view to_string(Zeta zeta);
Zeta parse_zeta(std::string_view text);

// Classic C_R(tau) in percent; one trajectory per participant.
double consensus_at(const DissimilarityMatrix& matrix, double tau);

// Production C*_R(tau) in percent over participant pairs.
double production_consensus_at(const DissimilarityMatrix& matrix, double tau, Zeta zeta);

// Same, computing DTW between every trial of every participant pair.
// Throws AnalysisError if any group is empty.
double production_consensus_at(std::span<const std::vector<Trajectory>> groups, double tau,
                               Zeta zeta, const DtwOptions& opts = {});

// Aggregated participant-by-participant dissimilarity (row-major,
// participants() order). With single trials this is the matrix itself.
std::vector<double> aggregate_by_participant(const DissimilarityMatrix& matrix, Zeta zeta);

struct CurveSample {
  double tau = 0.0;
  double consensus = 0.0;  // percent
};

struct ConsensusCurve {
  ReferentId referent;
  std::vector<CurveSample> samples;
  std::optional<Zeta> zeta;  // set for production curves
  std::optional<LogisticFit> fit;  // absent when fewer than 4 samples
};

inline constexpr std::size_t kDefaultTauPoints = 50;

// `points` evenly spaced values from 0 to the largest dissimilarity (or to 1
// when every dissimilarity is 0).
std::vector<double> default_tau_grid(const DissimilarityMatrix& matrix,
                                     std::size_t points = kDefaultTauPoints);

// Evaluates consensus at each tau (classic when zeta is empty) and attaches
// a logistic fit. The grid must be strictly increasing with >= 3 points.
ConsensusCurve sweep_tau(const DissimilarityMatrix& matrix, std::span<const double> tau_grid,
                         std::optional<Zeta> zeta = std::nullopt,
                         const LogisticFitOptions& fit_opts = {});

}  // namespace elicit
