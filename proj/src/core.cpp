#include "elicit/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void add(ValidationReport& report, ViolationKind kind, ReferentId referent,
         ParticipantId participant, std::string message) {
  report.violations.push_back(
      {kind, std::move(referent), std::move(participant), std::move(message)});
}

void check_study(const Study& study, ValidationReport& report) {
  std::set<std::string_view> seen;
  for (const auto& p : study.participants) {
    if (!seen.insert(p).second) {
      add(report, ViolationKind::duplicate_participant, {}, p,
          "participant id '" + p + "' listed more than once");
    }
  }
  seen.clear();
  for (const auto& r : study.referents) {
    if (!seen.insert(r).second) {
      add(report, ViolationKind::duplicate_referent, r, {},
          "referent id '" + r + "' listed more than once");
    }
  }
  if (study.participants.size() < 2) {
    add(report, ViolationKind::too_few_participants, {}, {},
        "study needs at least 2 participants, has " +
            std::to_string(study.participants.size()));
  }
}

}  // namespace

std::string normalize_bin(std::string_view label) {
  std::string out(trim(label));
  std::transform(out.begin(), out.end(), out.begin(), to_lower);
  return out;
}

std::string normalize_utterance(std::string_view text) {
  std::string collapsed;
  collapsed.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(to_lower(c));
  }
  // Stripping punctuation can expose whitespace ("hello !"), so alternate.
  std::string_view view = collapsed;
  for (;;) {
    const std::size_t before = view.size();
    while (!view.empty() && is_punct(view.front())) view.remove_prefix(1);
    while (!view.empty() && is_punct(view.back())) view.remove_suffix(1);
    view = trim(view);
    if (view.size() == before) break;
  }
  return std::string(view);
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::duplicate_participant: return "duplicate participant";
    case ViolationKind::duplicate_referent: return "duplicate referent";
    case ViolationKind::too_few_participants: return "too few participants";
    case ViolationKind::unknown_participant: return "unknown participant";
    case ViolationKind::unknown_referent: return "unknown referent";
    case ViolationKind::duplicate_table: return "duplicate table";
    case ViolationKind::missing_referent: return "missing referent";
    case ViolationKind::missing_participant: return "missing participant";
    case ViolationKind::duplicate_entry: return "duplicate entry";
    case ViolationKind::non_contiguous_trials: return "non-contiguous trials";
    case ViolationKind::multiple_trials_in_classic: return "multiple trials in classic study";
    case ViolationKind::empty_bin: return "empty bin label";
    case ViolationKind::empty_utterance: return "empty utterance";
    case ViolationKind::too_few_frames: return "too few frames";
    case ViolationKind::bad_frame_rate: return "bad frame rate";
    case ViolationKind::inconsistent_joint_count: return "inconsistent joint count";
    case ViolationKind::non_finite_coordinate: return "non-finite coordinate";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(),
      [kind](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate_study(const Study& study,
                                std::span<const ProposalTable> tables,
                                StudyDesign design) {
  ValidationReport report;
  check_study(study, report);

  const std::set<std::string_view> participants(study.participants.begin(),
                                                study.participants.end());
  const std::set<std::string_view> referents(study.referents.begin(),
                                             study.referents.end());
  std::set<std::string_view> covered;

  for (const auto& table : tables) {
    const auto& r = table.referent;
    if (!referents.contains(r)) {
      add(report, ViolationKind::unknown_referent, r, {},
          "table for referent '" + r + "' which is not part of the study");
    }
    if (!covered.insert(r).second) {
      add(report, ViolationKind::duplicate_table, r, {},
          "more than one proposal table for referent '" + r + "'");
      continue;
    }

    std::map<std::string_view, std::vector<std::size_t>> trials;
    for (const auto& e : table.entries) {
      if (!participants.contains(e.participant)) {
        add(report, ViolationKind::unknown_participant, r, e.participant,
            "participant '" + e.participant + "' is not part of the study");
      }
      if (normalize_bin(e.bin).empty()) {
        add(report, ViolationKind::empty_bin, r, e.participant,
            "empty bin label for participant '" + e.participant + "' trial " +
                std::to_string(e.trial));
      }
      trials[e.participant].push_back(e.trial);
    }

    for (auto& [participant, list] : trials) {
      const std::string who(participant);
      std::sort(list.begin(), list.end());
      const auto dup = std::adjacent_find(list.begin(), list.end());
      if (dup != list.end()) {
        add(report, ViolationKind::duplicate_entry, r, who,
            "participant '" + who + "' has trial " + std::to_string(*dup) +
                " more than once");
        list.erase(std::unique(list.begin(), list.end()), list.end());
      }
      if (list.front() != 0 || list.back() != list.size() - 1) {
        add(report, ViolationKind::non_contiguous_trials, r, who,
            "participant '" + who + "' trials are not numbered 0.." +
                std::to_string(list.size() - 1));
      } else if (design == StudyDesign::classic && list.size() > 1) {
        add(report, ViolationKind::multiple_trials_in_classic, r, who,
            "participant '" + who + "' has " + std::to_string(list.size()) +
                " proposals in a classic study");
      }
    }

    for (const auto& p : study.participants) {
      if (!trials.contains(p)) {
        add(report, ViolationKind::missing_participant, r, p,
            "participant '" + p + "' has no proposal for referent '" + r + "'");
      }
    }
  }

  for (const auto& r : study.referents) {
    if (!covered.contains(r)) {
      add(report, ViolationKind::missing_referent, r, {},
          "no proposal table for referent '" + r + "'");
    }
  }
  return report;
}

ValidationReport validate_speech(const Study& study,
                                 std::span<const SpeechTable> tables) {
  ValidationReport report;
  const std::set<std::string_view> participants(study.participants.begin(),
                                                study.participants.end());
  const std::set<std::string_view> referents(study.referents.begin(),
                                             study.referents.end());
  std::set<std::string_view> covered;
  for (const auto& table : tables) {
    const auto& r = table.referent;
    if (!referents.contains(r)) {
      add(report, ViolationKind::unknown_referent, r, {},
          "speech table for referent '" + r + "' which is not part of the study");
    }
    if (!covered.insert(r).second) {
      add(report, ViolationKind::duplicate_table, r, {},
          "more than one speech table for referent '" + r + "'");
      continue;
    }
    std::set<std::string_view> seen;
    for (const auto& e : table.entries) {
      if (!participants.contains(e.participant)) {
        add(report, ViolationKind::unknown_participant, r, e.participant,
            "participant '" + e.participant + "' is not part of the study");
      }
      if (!seen.insert(e.participant).second) {
        add(report, ViolationKind::duplicate_entry, r, e.participant,
            "participant '" + e.participant + "' has more than one utterance");
      }
      if (normalize_utterance(e.utterance).empty()) {
        add(report, ViolationKind::empty_utterance, r, e.participant,
            "empty utterance for participant '" + e.participant + "'");
      }
    }
  }
  return report;
}

ValidationReport validate_trajectory(const Trajectory& t) {
  ValidationReport report;
  const std::string where = "'" + t.participant + "' / '" + t.referent +
                            "' trial " + std::to_string(t.trial);
  if (t.frames.size() < 2) {
    add(report, ViolationKind::too_few_frames, t.referent, t.participant,
        "trajectory " + where + " has " + std::to_string(t.frames.size()) +
            " frame(s); at least 2 are required");
  }
  if (!(t.frame_rate > 0.0) || !std::isfinite(t.frame_rate)) {
    add(report, ViolationKind::bad_frame_rate, t.referent, t.participant,
        "trajectory " + where + " frame rate must be positive");
  }
  const std::size_t joints = t.joint_count();
  bool counted = false;
  bool finite_reported = false;
  for (std::size_t f = 0; f < t.frames.size(); ++f) {
    const auto& frame = t.frames[f];
    if (!counted && (frame.joints.size() != joints || joints == 0)) {
      add(report, ViolationKind::inconsistent_joint_count, t.referent,
          t.participant,
          "trajectory " + where + " frame " + std::to_string(f) + " has " +
              std::to_string(frame.joints.size()) + " joints, expected " +
              (joints == 0 ? std::string("at least 1") : std::to_string(joints)));
      counted = true;
    }
    for (const auto& p : frame.joints) {
      if (finite_reported) break;
      if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
        add(report, ViolationKind::non_finite_coordinate, t.referent,
            t.participant,
            "trajectory " + where + " frame " + std::to_string(f) +
                " has a non-finite coordinate");
        finite_reported = true;
      }
    }
  }
  return report;
}

void require_classic(const ProposalTable& table) {
  if (table.entries.empty()) {
    throw AnalysisError("no proposals for referent '" + table.referent + "'");
  }
  std::set<std::string_view> seen;
  for (const auto& e : table.entries) {
    if (e.trial != 0) {
      throw AnalysisError("referent '" + table.referent +
                          "' is not a classic table: participant '" +
                          e.participant + "' has trial " +
                          std::to_string(e.trial));
    }
    if (!seen.insert(e.participant).second) {
      throw AnalysisError("referent '" + table.referent + "': participant '" +
                          e.participant + "' proposed more than once");
    }
    if (normalize_bin(e.bin).empty()) {
      throw AnalysisError("referent '" + table.referent +
                          "': empty bin label for participant '" +
                          e.participant + "'");
    }
  }
}

}  // namespace elicit
