#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "elicit/consensus.hpp"

namespace elicit {

struct ClusterOptions {
  // Minimum fraction of member pairs that must be similar. 1.0 demands a
  // clique in the similarity graph; values down to 0.5 relax it.
  double acceptance_ratio = 1.0;
};

struct ConsensusCluster {
  ReferentId referent;
  double tau = 0.0;
  std::vector<TrajectoryKey> members;  // matrix order
  std::vector<std::size_t> member_indices;
  double agreement_ratio = 0.0;  // similar member pairs / member pairs
  double coverage = 0.0;         // percent of participants represented
};

// Greedy hill climbing on a pair-similarity matrix w (row-major n x n, values
// in [0,1], diagonal ignored). Every pair with w >= acceptance is tried as a
// seed, ordered by combined similarity degree; each seed grows by the
// candidate that keeps the within-cluster ratio highest until no candidate
// keeps it >= acceptance. Returns the largest cluster (indices ascending), or
// an empty list when no pair qualifies as a seed.
std::vector<std::size_t> greedy_cluster(std::span<const double> weights, std::size_t n,
                                        double acceptance_ratio);

// Cluster on the binary matrix [dissimilarity <= tau].
ConsensusCluster extract_cluster(const DissimilarityMatrix& matrix, double tau,
                                 const ClusterOptions& opts = {});

// Cluster on the mean of the binary matrices over several tau values. The
// reported tau is the largest one.
ConsensusCluster extract_cluster_stacked(const DissimilarityMatrix& matrix,
                                         std::span<const double> taus,
                                         const ClusterOptions& opts = {});

}  // namespace elicit
