#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "elicit/core.hpp"

namespace oracle {

// Agreement rate by direct enumeration of every unordered participant pair.
inline double pairwise_agreement_rate(const std::vector<int>& labels) {
  std::size_t agree = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      ++pairs;
      if (labels[i] == labels[j]) ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(pairs);
}

inline std::vector<std::size_t> class_sizes(const std::vector<int>& labels) {
  std::vector<std::size_t> sizes;
  for (int l : labels) {
    if (static_cast<std::size_t>(l) >= sizes.size()) sizes.resize(l + 1, 0);
    ++sizes[l];
  }
  std::erase(sizes, 0u);
  return sizes;
}

// Every set partition of {0..n-1} as restricted growth strings.
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
    if (i == n) {
      fn(a);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      a[i] = l;
      rec(i + 1, std::max(max_label, l));
    }
  };
  if (n == 0) return;
  a[0] = 0;
  rec(1, 0);
}

inline std::uint64_t bell_number(std::size_t n) {
  std::vector<std::vector<std::uint64_t>> t(n + 1);
  t[0] = {1};
  for (std::size_t i = 1; i <= n; ++i) {
    t[i].push_back(t[i - 1].back());
    for (std::size_t j = 0; j < t[i - 1].size(); ++j) t[i].push_back(t[i].back() + t[i - 1][j]);
  }
  return t[n].front();
}

inline std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int max_classes) {
  std::uniform_int_distribution<int> pick(0, max_classes - 1);
  std::vector<int> labels(n);
  for (auto& l : labels) l = pick(rng);
  return labels;
}

inline elicit::ProposalTable table_from_labels(const std::vector<int>& labels,
                                               const std::string& referent = "r") {
  elicit::ProposalTable t{referent, {}};
  for (std::size_t i = 0; i < labels.size(); ++i)
    t.entries.push_back({"P" + std::to_string(i + 1), 0, "bin" + std::to_string(labels[i])});
  return t;
}

// Textbook full-table DTW: D[i][j] = c(i,j) + min(D[i-1][j], D[i][j-1], D[i-1][j-1]).
inline double reference_dtw(const elicit::Trajectory& a, const elicit::Trajectory& b) {
  const std::size_t n = a.frames.size(), m = b.frames.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, inf));
  d[0][0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double c = 0.0;
      const auto& fa = a.frames[i - 1].joints;
      const auto& fb = b.frames[j - 1].joints;
      for (std::size_t k = 0; k < fa.size(); ++k) {
        double s = 0.0;
        for (int ax = 0; ax < 3; ++ax) s += (fa[k][ax] - fb[k][ax]) * (fa[k][ax] - fb[k][ax]);
        c += std::sqrt(s);
      }
      d[i][j] = c + std::min({d[i - 1][j], d[i][j - 1], d[i - 1][j - 1]});
    }
  }
  return d[n][m];
}

inline elicit::Trajectory random_trajectory(std::mt19937_64& rng, std::size_t joints,
                                            std::size_t min_frames, std::size_t max_frames,
                                            const std::string& participant = "P1",
                                            std::size_t trial = 0) {
  std::uniform_int_distribution<std::size_t> frames_dist(min_frames, max_frames);
  std::normal_distribution<double> step(0.0, 0.05);
  std::uniform_real_distribution<double> start(-0.5, 0.5);
  elicit::Trajectory t;
  t.participant = participant;
  t.referent = "r";
  t.trial = trial;
  t.frame_rate = 25.0;
  std::vector<elicit::Point3> pos(joints);
  for (auto& p : pos) p = {start(rng), start(rng), start(rng)};
  const std::size_t count = frames_dist(rng);
  for (std::size_t f = 0; f < count; ++f) {
    elicit::Frame frame;
    for (auto& p : pos) {
      for (auto& c : p) c += step(rng);
      frame.joints.push_back(p);
    }
    t.frames.push_back(std::move(frame));
  }
  return t;
}

// Size of a maximum clique in an undirected graph given as an n x n 0/1 matrix.
inline std::size_t max_clique_size(const std::vector<std::vector<bool>>& adj) {
  const std::size_t n = adj.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const std::size_t size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size <= best) continue;
    bool clique = true;
    for (std::size_t i = 0; i < n && clique; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((mask >> j & 1u) && !adj[i][j]) {
          clique = false;
          break;
        }
      }
    }
    if (clique) best = size;
  }
  // Singletons do not form a cluster.
  return best >= 2 ? best : 0;
}

}  // namespace oracle
