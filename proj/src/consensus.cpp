#include "elicit/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "elicit/detail/parallel.hpp"
#include "elicit/errors.hpp"

namespace elicit {

namespace {

double percent(std::size_t similar, std::size_t participants) {
  const std::size_t pairs = participants * (participants - 1) / 2;
  return 100.0 * static_cast<double>(similar) / static_cast<double>(pairs);
}

void require_tau(double tau) {
  if (!(tau >= 0.0)) throw AnalysisError("tau must be a non-negative number");
}

double aggregate(std::span<const double> values, Zeta zeta) {
  switch (zeta) {
    case Zeta::min: return *std::min_element(values.begin(), values.end());
    case Zeta::max: return *std::max_element(values.begin(), values.end());
    case Zeta::avg: {
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum / static_cast<double>(values.size());
    }
  }
  return 0.0;
}

// Indices of each participant's trajectories, participants in first-seen order.
std::vector<std::vector<std::size_t>> group_indices(const DissimilarityMatrix& m) {
  std::map<std::string_view, std::size_t> slot;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto [it, fresh] = slot.try_emplace(m.order()[i].participant, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

}  // namespace

DissimilarityMatrix::DissimilarityMatrix(ReferentId referent, std::vector<TrajectoryKey> order,
                                         std::vector<double> values)
    : referent_(std::move(referent)), order_(std::move(order)), values_(std::move(values)) {
  const std::size_t n = order_.size();
  if (values_.size() != n * n) {
    throw AnalysisError("dissimilarity matrix: expected " + std::to_string(n * n) +
                        " values, got " + std::to_string(values_.size()));
  }
  std::set<TrajectoryKey> keys(order_.begin(), order_.end());
  if (keys.size() != n) throw AnalysisError("dissimilarity matrix: duplicate trajectory key");
  for (std::size_t i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw AnalysisError("dissimilarity matrix: non-zero diagonal");
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw AnalysisError("dissimilarity matrix: values must be finite and non-negative");
      }
      if (v != (*this)(j, i)) throw AnalysisError("dissimilarity matrix: not symmetric");
    }
  }
}

double DissimilarityMatrix::max_value() const noexcept {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

std::vector<ParticipantId> DissimilarityMatrix::participants() const {
  std::vector<ParticipantId> out;
  std::set<std::string_view> seen;
  for (const auto& k : order_) {
    if (seen.insert(k.participant).second) out.push_back(k.participant);
  }
  return out;
}

DissimilarityMatrix dissimilarity_matrix(std::span<const Trajectory> trajectories,
                                         const DtwOptions& opts) {
  const std::size_t n = trajectories.size();
  std::vector<TrajectoryKey> order;
  order.reserve(n);
  for (const auto& t : trajectories) {
    if (t.referent != trajectories.front().referent) {
      throw AnalysisError("dissimilarity matrix: trajectories span several referents ('" +
                          trajectories.front().referent + "', '" + t.referent + "')");
    }
    order.push_back({t.participant, t.trial});
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(n * n, 0.0);
  detail::parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double d = dtw_distance(trajectories[i], trajectories[j], opts);
    values[i * n + j] = d;
    values[j * n + i] = d;
  });
  return DissimilarityMatrix(n > 0 ? trajectories.front().referent : ReferentId{},
                             std::move(order), std::move(values));
}

std::string_view to_string(Zeta zeta) {
  switch (zeta) {
    case Zeta::min: return "min";
    case Zeta::max: return "max";
    case Zeta::avg: return "avg";
  }
  return "?";
}

Zeta parse_zeta(std::string_view text) {
  if (text == "min") return Zeta::min;
  if (text == "max") return Zeta::max;
  if (text == "avg") return Zeta::avg;
  throw AnalysisError("unknown zeta '" + std::string(text) + "' (expected min, max or avg)");
}

double consensus_at(const DissimilarityMatrix& matrix, double tau) {
  require_tau(tau);
  const std::size_t n = matrix.size();
  if (n < 2) throw AnalysisError("consensus needs at least 2 trajectories");
  if (matrix.participants().size() != n) {
    throw AnalysisError("classic consensus needs one trajectory per participant; "
                        "use the production variant for repeated trials");
  }
  std::size_t similar = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix(i, j) <= tau) ++similar;
    }
  }
  return percent(similar, n);
}

std::vector<double> aggregate_by_participant(const DissimilarityMatrix& matrix, Zeta zeta) {
  const auto groups = group_indices(matrix);
  const std::size_t p = groups.size();
  std::vector<double> out(p * p, 0.0);
  std::vector<double> cross;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      cross.clear();
      for (std::size_t i : groups[a]) {
        for (std::size_t j : groups[b]) cross.push_back(matrix(i, j));
      }
      const double v = aggregate(cross, zeta);
      out[a * p + b] = v;
      out[b * p + a] = v;
    }
  }
  return out;
}

double production_consensus_at(const DissimilarityMatrix& matrix, double tau, Zeta zeta) {
  require_tau(tau);
  const auto agg = aggregate_by_participant(matrix, zeta);
  const std::size_t p = matrix.participants().size();
  if (p < 2) throw AnalysisError("consensus needs at least 2 participants");
  std::size_t similar = 0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      if (agg[a * p + b] <= tau) ++similar;
    }
  }
  return percent(similar, p);
}

double production_consensus_at(std::span<const std::vector<Trajectory>> groups, double tau,
                               Zeta zeta, const DtwOptions& opts) {
  require_tau(tau);
  if (groups.size() < 2) throw AnalysisError("consensus needs at least 2 participants");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) {
      throw AnalysisError("participant group " + std::to_string(g) + " has no trajectories");
    }
  }
  std::size_t similar = 0;
  std::vector<double> cross;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      cross.clear();
      for (const auto& ta : groups[a]) {
        for (const auto& tb : groups[b]) cross.push_back(dtw_distance(ta, tb, opts));
      }
      if (aggregate(cross, zeta) <= tau) ++similar;
    }
  }
  return percent(similar, groups.size());
}

std::vector<double> default_tau_grid(const DissimilarityMatrix& matrix, std::size_t points) {
  if (points < 2) throw AnalysisError("tau grid needs at least 2 points");
  double top = matrix.max_value();
  if (!(top > 0.0)) top = 1.0;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = top * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = top;
  return grid;
}

ConsensusCurve sweep_tau(const DissimilarityMatrix& matrix, std::span<const double> tau_grid,
                         std::optional<Zeta> zeta, const LogisticFitOptions& fit_opts) {
  if (tau_grid.size() < 3) throw AnalysisError("tau grid needs at least 3 points");
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    require_tau(tau_grid[i]);
    if (i > 0 && !(tau_grid[i] > tau_grid[i - 1])) {
      throw AnalysisError("tau grid must be strictly increasing");
    }
  }

  ConsensusCurve curve;
  curve.referent = matrix.referent();
  curve.zeta = zeta;
  curve.samples.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const double c = zeta ? production_consensus_at(matrix, tau, *zeta) : consensus_at(matrix, tau);
    if (!curve.samples.empty() && c < curve.samples.back().consensus) {
      throw std::logic_error("consensus curve decreased in tau");
    }
    curve.samples.push_back({tau, c});
  }

  if (curve.samples.size() >= 4) {
    std::vector<double> xs, ys;
    for (const auto& s : curve.samples) {
      xs.push_back(s.tau);
      ys.push_back(s.consensus);
    }
    curve.fit = fit_logistic(xs, ys, fit_opts);
  }
  return curve;
}

}  // namespace elicit
