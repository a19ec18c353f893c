#include "elicit/cluster.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

constexpr double kRatioSlack = 1e-12;

void require_options(const ClusterOptions& opts) {
  if (!(opts.acceptance_ratio >= 0.5 && opts.acceptance_ratio <= 1.0)) {
    throw AnalysisError("cluster acceptance ratio must lie in [0.5, 1]");
  }
}

ConsensusCluster finish(const DissimilarityMatrix& matrix, double tau,
                        std::span<const double> weights, std::vector<std::size_t> members) {
  ConsensusCluster out;
  out.referent = matrix.referent();
  out.tau = tau;
  const std::size_t n = matrix.size();
  double within = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      within += weights[members[a] * n + members[b]];
    }
  }
  const std::size_t pairs = members.size() * (members.size() > 0 ? members.size() - 1 : 0) / 2;
  out.agreement_ratio = pairs > 0 ? within / static_cast<double>(pairs) : 0.0;

  std::set<std::string_view> covered;
  for (std::size_t i : members) {
    out.members.push_back(matrix.order()[i]);
    covered.insert(matrix.order()[i].participant);
  }
  const auto total = matrix.participants().size();
  out.coverage = total > 0 ? 100.0 * static_cast<double>(covered.size()) /
                                 static_cast<double>(total)
                           : 0.0;
  out.member_indices = std::move(members);
  return out;
}

}  // namespace

std::vector<std::size_t> greedy_cluster(std::span<const double> w, std::size_t n,
                                        double acceptance) {
  if (w.size() != n * n) throw AnalysisError("greedy_cluster: weight matrix size mismatch");

  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) degree[i] += w[i * n + j];
    }
  }

  struct Seed {
    double degree_sum;
    double weight;
    std::size_t i, j;
  };
  std::vector<Seed> seeds;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = w[i * n + j];
      if (v > 0.0 && v + kRatioSlack >= acceptance) {
        seeds.push_back({degree[i] + degree[j], v, i, j});
      }
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    return std::tie(b.degree_sum, b.weight) < std::tie(a.degree_sum, a.weight);
  });

  std::vector<std::size_t> best;
  std::vector<double> link(n);  // sum of weights from each node into the cluster
  std::vector<char> in(n);
  for (const auto& seed : seeds) {
    std::fill(in.begin(), in.end(), 0);
    std::vector<std::size_t> cluster{seed.i, seed.j};
    in[seed.i] = in[seed.j] = 1;
    double within = seed.weight;
    for (std::size_t c = 0; c < n; ++c) link[c] = w[c * n + seed.i] + w[c * n + seed.j];

    for (;;) {
      const double pairs_after = static_cast<double>((cluster.size() + 1) * cluster.size()) / 2.0;
      std::size_t pick = n;
      double pick_ratio = -1.0;
      for (std::size_t c = 0; c < n; ++c) {
        if (in[c]) continue;
        const double ratio = (within + link[c]) / pairs_after;
        if (ratio > pick_ratio || (ratio == pick_ratio && degree[c] > degree[pick])) {
          pick = c;
          pick_ratio = ratio;
        }
      }
      if (pick == n || pick_ratio + kRatioSlack < acceptance) break;
      within += link[pick];
      in[pick] = 1;
      cluster.push_back(pick);
      for (std::size_t c = 0; c < n; ++c) link[c] += w[c * n + pick];
    }
    if (cluster.size() > best.size()) best = std::move(cluster);
    if (best.size() == n) break;
  }
  std::sort(best.begin(), best.end());
  return best;
}

ConsensusCluster extract_cluster(const DissimilarityMatrix& matrix, double tau,
                                 const ClusterOptions& opts) {
  if (!(tau >= 0.0)) throw AnalysisError("tau must be a non-negative number");
  require_options(opts);
  const std::size_t n = matrix.size();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && matrix(i, j) <= tau) w[i * n + j] = 1.0;
    }
  }
  auto members = greedy_cluster(w, n, opts.acceptance_ratio);
  return finish(matrix, tau, w, std::move(members));
}

ConsensusCluster extract_cluster_stacked(const DissimilarityMatrix& matrix,
                                         std::span<const double> taus,
                                         const ClusterOptions& opts) {
  if (taus.empty()) throw AnalysisError("stacked clustering needs at least one tau");
  require_options(opts);
  const std::size_t n = matrix.size();
  std::vector<double> w(n * n, 0.0);
  for (double tau : taus) {
    if (!(tau >= 0.0)) throw AnalysisError("tau must be a non-negative number");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && matrix(i, j) <= tau) w[i * n + j] += 1.0;
      }
    }
  }
  for (auto& v : w) v /= static_cast<double>(taus.size());
  auto members = greedy_cluster(w, n, opts.acceptance_ratio);
  return finish(matrix, *std::max_element(taus.begin(), taus.end()), w, std::move(members));
}

}  // namespace elicit
