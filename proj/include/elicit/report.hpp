#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "elicit/agreement.hpp"
#include "elicit/bundle.hpp"
#include "elicit/cluster.hpp"
#include "elicit/consensus.hpp"
#include "elicit/monte_carlo.hpp"
#include "elicit/trajectory.hpp"

namespace elicit {

inline constexpr std::string_view kToolkitName = "elicit";
inline constexpr std::string_view kToolkitVersion = "0.1.0";

struct ReportConfig {
  std::uint64_t seed = 0;
  double threshold = kDefaultConsensusThreshold;
  std::optional<std::vector<double>> tau_grid;  // default: per-referent grid
  std::size_t tau_points = kDefaultTauPoints;
  Zeta zeta = Zeta::avg;  // production studies only
  std::size_t baseline = 1;
  std::size_t draws = 10000;
  // Category count for the null model; defaults to the number of distinct
  // bins observed across the study.
  std::optional<std::size_t> categories;
  // Tau for cluster extraction; defaults to the fitted midpoint when the fit
  // converged inside the grid, else the middle of the grid.
  std::optional<double> cluster_tau;
  ClusterOptions cluster;
  PreprocessConfig preprocess;
  DtwOptions dtw;
  double fit_alpha = 0.05;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

enum class SectionStatus { ok, skipped, error };

std::string_view to_string(SectionStatus status);

struct ReportSection {
  std::string name;
  SectionStatus status = SectionStatus::ok;
  std::string message;  // notice for skipped, error text for error
  nlohmann::ordered_json data;
};

// Fixed section order in every report.
inline constexpr std::string_view kSectionNames[] = {
    "summary", "agreement", "chance_agreement", "consensus_set",
    "speech",  "dissimilarity", "simulation", "survey"};

struct StudyReport {
  std::string toolkit = std::string(kToolkitName);
  std::string version = std::string(kToolkitVersion);
  std::string study_id;
  std::string input_hash;
  nlohmann::ordered_json config;
  std::vector<ReportSection> sections;

  const ReportSection* section(std::string_view name) const;
};

// Per-referent output of the trajectory pipeline.
struct DissimilarityResult {
  ReferentId referent;
  std::optional<DissimilarityMatrix> matrix;
  std::optional<ConsensusCurve> curve;
  std::optional<ConsensusCluster> cluster;
  std::string tau_source;  // how the cluster tau was chosen
  std::string error;       // set when this referent could not be analysed
};

std::vector<DissimilarityResult> analyze_dissimilarity(const StudyBundle& bundle,
                                                       const ReportConfig& cfg);

// Builds one named section. Metric errors are caught and recorded in the
// section; missing inputs give a skipped section.
ReportSection build_section(std::string_view name, const StudyBundle& bundle,
                            const ReportConfig& cfg);

// All sections, computed concurrently, assembled in kSectionNames order.
StudyReport run_report(const StudyBundle& bundle, const ReportConfig& cfg = {});

nlohmann::ordered_json to_json(const StudyReport& report);
nlohmann::ordered_json config_to_json(const ReportConfig& cfg);

// Pretty-printed JSON with a trailing newline. Byte-identical for identical
// bundles and configs.
std::string serialize_report(const StudyReport& report);

// Tidy CSV: referent,zeta,tau,consensus
std::string curves_to_csv(const std::vector<DissimilarityResult>& results);
// Tidy CSV: draw,agreement_rate
std::string null_samples_to_csv(const NullDistribution& dist);

}  // namespace elicit
