#pragma once

// Study data model shared by every analysis module.
//
// All records are plain values. Nothing here mutates after construction, so
// instances can be shared freely between threads.

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

using ParticipantId = std::string;
using ReferentId = std::string;
using BinLabel = std::string;

struct Study {
  std::string id;
  std::vector<ParticipantId> participants;
  std::vector<ReferentId> referents;
  std::map<std::string, std::string> metadata;

  std::size_t participant_count() const noexcept { return participants.size(); }
};

struct ProposalEntry {
  ParticipantId participant;
  std::size_t trial = 0;
  BinLabel bin;

  bool operator==(const ProposalEntry&) const = default;
};

// All proposals recorded for one referent. Classic studies carry exactly one
// entry per participant at trial 0; production studies carry trials 0..k.
struct ProposalTable {
  ReferentId referent;
  std::vector<ProposalEntry> entries;

  bool operator==(const ProposalTable&) const = default;
};

struct SpeechEntry {
  ParticipantId participant;
  std::string utterance;

  bool operator==(const SpeechEntry&) const = default;
};

struct SpeechTable {
  ReferentId referent;
  std::vector<SpeechEntry> entries;

  bool operator==(const SpeechTable&) const = default;
};

using Point3 = std::array<double, 3>;

struct Frame {
  std::vector<Point3> joints;  // meters

  bool operator==(const Frame&) const = default;
};

struct Trajectory {
  ParticipantId participant;
  ReferentId referent;
  std::size_t trial = 0;
  std::vector<Frame> frames;
  double frame_rate = 0.0;  // Hz

  std::size_t joint_count() const noexcept {
    return frames.empty() ? 0 : frames.front().joints.size();
  }
  bool operator==(const Trajectory&) const = default;
};

enum class StudyDesign { classic, production };

// Bin equivalence is exact equality after trimming and lowercasing.
std::string normalize_bin(std::string_view label);

// Lowercase, collapse internal whitespace, strip leading/trailing punctuation.
std::string normalize_utterance(std::string_view text);

enum class ViolationKind {
  duplicate_participant,
  duplicate_referent,
  too_few_participants,
  unknown_participant,
  unknown_referent,
  duplicate_table,
  missing_referent,
  missing_participant,
  duplicate_entry,
  non_contiguous_trials,
  multiple_trials_in_classic,
  empty_bin,
  empty_utterance,
  too_few_frames,
  bad_frame_rate,
  inconsistent_joint_count,
  non_finite_coordinate,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  ReferentId referent;        // empty when not referent-specific
  ParticipantId participant;  // empty when not participant-specific
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

// Checks the study's own invariants plus every proposal table against it.
// Problems are collected, never thrown. The result is a pure function of
// the inputs, including ordering.
ValidationReport validate_study(const Study& study,
                                std::span<const ProposalTable> tables,
                                StudyDesign design = StudyDesign::classic);

ValidationReport validate_speech(const Study& study,
                                 std::span<const SpeechTable> tables);

ValidationReport validate_trajectory(const Trajectory& trajectory);

// Table-local checks used by the metric functions before they compute
// anything; throws AnalysisError describing the first problem.
void require_classic(const ProposalTable& table);

}  // namespace elicit
