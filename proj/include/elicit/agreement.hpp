#pragma once

// Agreement statistics over binned proposals.
//
// For a referent with proposal set P partitioned into equivalence classes
// P_1..P_n (|P| = N):
//
//   agreement index  A  = sum_i (|P_i| / N)^2
//   agreement rate   AR = sum_i C(|P_i|, 2) / C(N, 2)
//
// and A = (AR * (N - 1) + 1) / N, so both rank referents identically.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elicit/core.hpp"

namespace elicit {

// Unreduced ratio of non-negative integers.
struct Fraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  Fraction reduced() const noexcept;
  // Cross-multiplied equality; 218/380 == 109/190.
  bool equivalent(const Fraction& other) const noexcept;
};

struct BinCount {
  BinLabel bin;  // normalized label
  std::size_t count = 0;
};

// Class sizes of a classic table, sorted by descending count then label.
std::vector<BinCount> bin_counts(const ProposalTable& table);

Fraction agreement_index_exact(std::span<const std::size_t> class_sizes);
Fraction agreement_rate_exact(std::span<const std::size_t> class_sizes);

double agreement_index(std::span<const std::size_t> class_sizes);
double agreement_rate(std::span<const std::size_t> class_sizes);

// Throws AnalysisError("no proposals ...") on an empty table.
double agreement_index(const ProposalTable& table);
// Throws AnalysisError("insufficient participants ...") when N < 2.
double agreement_rate(const ProposalTable& table);

struct AgreementScore {
  ReferentId referent;
  double agreement_index = 0.0;
  double agreement_rate = 0.0;
  Fraction agreement_index_exact;
  Fraction agreement_rate_exact;
  std::vector<std::size_t> class_sizes;  // descending
};

AgreementScore score_referent(const ProposalTable& table);

struct ChanceAgreement {
  double p_e = 0.0;
  std::vector<BinLabel> categories;          // q labels, sorted
  std::vector<double> pi_k;                  // per category, sums to 1
  std::vector<std::vector<std::size_t>> counts;  // m x q, n_ik
  std::vector<std::size_t> row_totals;       // n_i
  std::vector<ReferentId> referents;         // row order
  double mean_agreement_rate = 0.0;
  double kappa = 0.0;

  std::size_t m() const noexcept { return referents.size(); }
  std::size_t q() const noexcept { return categories.size(); }
};

// Fleiss-style chance agreement over m referents. Categories are the union
// of normalized bins across all tables. kappa = (mean AR - p_e) / (1 - p_e);
// when p_e == 1 it is 1 if mean AR == 1, otherwise the distribution is
// degenerate and AnalysisError is thrown.
ChanceAgreement chance_agreement(std::span<const ProposalTable> tables);

// Percent of participants giving the modal utterance.
double max_consensus(const SpeechTable& table);

// Percent of distinct utterances proposed by more than `baseline`
// participants.
double consensus_distinct_ratio(const SpeechTable& table,
                                std::size_t baseline = 1);

struct ConsensusEntry {
  ReferentId referent;
  BinLabel top_bin;
  std::size_t support_count = 0;
  double agreement_rate = 0.0;
  bool accepted = false;
  // Every bin sharing the modal count, sorted; size > 1 means a tie was
  // broken lexicographically.
  std::vector<BinLabel> tied_bins;

  bool tied() const noexcept { return tied_bins.size() > 1; }
};

struct ConsensusSet {
  double threshold = 0.30;
  std::vector<ConsensusEntry> entries;
};

inline constexpr double kDefaultConsensusThreshold = 0.30;

ConsensusSet extract_consensus_set(std::span<const ProposalTable> tables,
                                   double threshold = kDefaultConsensusThreshold);

// Bonferroni-adjusted per-test alpha.
double bonferroni(double alpha, std::size_t test_count);

}  // namespace elicit
