#include "elicit/agreement.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

std::uint64_t total(std::span<const std::size_t> sizes) {
  return std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
}

std::vector<std::size_t> sizes_of(const std::vector<BinCount>& counts) {
  std::vector<std::size_t> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back(c.count);
  return out;
}

std::map<std::string, std::size_t> utterance_counts(const SpeechTable& table) {
  if (table.entries.empty()) {
    throw AnalysisError("no proposals for referent '" + table.referent + "'");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& e : table.entries) ++counts[normalize_utterance(e.utterance)];
  return counts;
}

std::set<std::string_view> participant_set(const ProposalTable& table) {
  std::set<std::string_view> out;
  for (const auto& e : table.entries) out.insert(e.participant);
  return out;
}

}  // namespace

Fraction Fraction::reduced() const noexcept {
  const std::uint64_t g = std::gcd(numerator, denominator);
  if (g == 0) return *this;
  return {numerator / g, denominator / g};
}

bool Fraction::equivalent(const Fraction& other) const noexcept {
  const auto a = reduced();
  const auto b = other.reduced();
  return a.numerator == b.numerator && a.denominator == b.denominator;
}

std::vector<BinCount> bin_counts(const ProposalTable& table) {
  require_classic(table);
  std::map<std::string, std::size_t> counts;
  for (const auto& e : table.entries) ++counts[normalize_bin(e.bin)];
  std::vector<BinCount> out;
  out.reserve(counts.size());
  for (auto& [bin, n] : counts) out.push_back({bin, n});
  std::stable_sort(out.begin(), out.end(), [](const BinCount& a, const BinCount& b) {
    return a.count > b.count;
  });
  return out;
}

Fraction agreement_index_exact(std::span<const std::size_t> class_sizes) {
  const std::uint64_t n = total(class_sizes);
  if (n == 0) throw AnalysisError("no proposals");
  std::uint64_t num = 0;
  for (std::uint64_t s : class_sizes) num += s * s;
  return {num, n * n};
}

Fraction agreement_rate_exact(std::span<const std::size_t> class_sizes) {
  const std::uint64_t n = total(class_sizes);
  if (n < 2) {
    throw AnalysisError("insufficient participants: agreement rate needs N >= 2, got " +
                        std::to_string(n));
  }
  // C(s,2)/C(n,2) with the common 1/2 cancelled.
  std::uint64_t num = 0;
  for (std::uint64_t s : class_sizes) num += s * (s == 0 ? 0 : s - 1);
  return {num, n * (n - 1)};
}

double agreement_index(std::span<const std::size_t> class_sizes) {
  return agreement_index_exact(class_sizes).value();
}

double agreement_rate(std::span<const std::size_t> class_sizes) {
  return agreement_rate_exact(class_sizes).value();
}

double agreement_index(const ProposalTable& table) {
  const auto sizes = sizes_of(bin_counts(table));
  return agreement_index(sizes);
}

double agreement_rate(const ProposalTable& table) {
  if (table.entries.size() < 2) {
    throw AnalysisError("insufficient participants for referent '" + table.referent +
                        "': agreement rate needs N >= 2");
  }
  const auto sizes = sizes_of(bin_counts(table));
  return agreement_rate(sizes);
}

AgreementScore score_referent(const ProposalTable& table) {
  AgreementScore score;
  score.referent = table.referent;
  score.class_sizes = sizes_of(bin_counts(table));
  score.agreement_index_exact = agreement_index_exact(score.class_sizes);
  score.agreement_rate_exact = agreement_rate_exact(score.class_sizes);
  score.agreement_index = score.agreement_index_exact.value();
  score.agreement_rate = score.agreement_rate_exact.value();
  return score;
}

ChanceAgreement chance_agreement(std::span<const ProposalTable> tables) {
  if (tables.empty()) throw AnalysisError("chance agreement needs at least one referent");

  const auto reference = participant_set(tables.front());
  std::set<std::string> categories;
  for (const auto& table : tables) {
    require_classic(table);
    if (participant_set(table) != reference) {
      throw AnalysisError("referent '" + table.referent +
                          "' does not share the participant set of referent '" +
                          tables.front().referent + "'");
    }
    for (const auto& e : table.entries) categories.insert(normalize_bin(e.bin));
  }

  ChanceAgreement out;
  out.categories.assign(categories.begin(), categories.end());
  const std::size_t q = out.categories.size();
  const double m = static_cast<double>(tables.size());
  out.pi_k.assign(q, 0.0);

  double ar_sum = 0.0;
  for (const auto& table : tables) {
    std::vector<std::size_t> row(q, 0);
    for (const auto& e : table.entries) {
      const auto label = normalize_bin(e.bin);
      const auto it = std::lower_bound(out.categories.begin(), out.categories.end(), label);
      ++row[static_cast<std::size_t>(it - out.categories.begin())];
    }
    const std::size_t n_i = table.entries.size();
    for (std::size_t k = 0; k < q; ++k) {
      out.pi_k[k] += static_cast<double>(row[k]) / static_cast<double>(n_i);
    }
    ar_sum += agreement_rate(table);
    out.referents.push_back(table.referent);
    out.row_totals.push_back(n_i);
    out.counts.push_back(std::move(row));
  }
  for (auto& p : out.pi_k) p /= m;
  for (double p : out.pi_k) out.p_e += p * p;
  out.mean_agreement_rate = ar_sum / m;

  if (out.p_e >= 1.0) {
    if (out.mean_agreement_rate >= 1.0) {
      out.kappa = 1.0;
    } else {
      throw AnalysisError("degenerate category distribution: chance agreement is 1 "
                          "but mean agreement rate is below 1");
    }
  } else {
    out.kappa = (out.mean_agreement_rate - out.p_e) / (1.0 - out.p_e);
  }
  return out;
}

double max_consensus(const SpeechTable& table) {
  const auto counts = utterance_counts(table);
  std::size_t modal = 0;
  for (const auto& [u, n] : counts) modal = std::max(modal, n);
  return 100.0 * static_cast<double>(modal) / static_cast<double>(table.entries.size());
}

double consensus_distinct_ratio(const SpeechTable& table, std::size_t baseline) {
  if (baseline == 0) throw AnalysisError("baseline must be a positive integer");
  const auto counts = utterance_counts(table);
  const auto above = std::count_if(counts.begin(), counts.end(),
                                   [baseline](const auto& kv) { return kv.second > baseline; });
  return 100.0 * static_cast<double>(above) / static_cast<double>(counts.size());
}

ConsensusSet extract_consensus_set(std::span<const ProposalTable> tables, double threshold) {
  ConsensusSet set;
  set.threshold = threshold;
  for (const auto& table : tables) {
    const auto counts = bin_counts(table);
    ConsensusEntry entry;
    entry.referent = table.referent;
    entry.support_count = counts.front().count;
    for (const auto& c : counts) {
      if (c.count == entry.support_count) entry.tied_bins.push_back(c.bin);
    }
    std::sort(entry.tied_bins.begin(), entry.tied_bins.end());
    entry.top_bin = entry.tied_bins.front();
    entry.agreement_rate = agreement_rate(table);
    entry.accepted = entry.agreement_rate >= threshold;
    set.entries.push_back(std::move(entry));
  }
  return set;
}

double bonferroni(double alpha, std::size_t test_count) {
  if (test_count == 0) throw AnalysisError("bonferroni: test count must be at least 1");
  return alpha / static_cast<double>(test_count);
}

}  // namespace elicit
