#pragma once

// A study bundle is a JSON manifest plus the data files it references:
//
//   {
//     "study": {"id": "...", "participants": [...], "referents": [...],
//               "metadata": {"key": "value"}},
//     "design": "classic" | "production",
//     "proposals": ["proposals.csv"],
//     "speech": ["speech.csv"],
//     "trajectories": ["traj/", "extra/p01_swipe_0.traj"],
//     "surveys": {"tlx": "tlx.csv",
//                 "likert": {"file": "likert.csv", "scale": [1, 5]}}
//   }
//
// Every key except "study" is optional; file entries may be a string or a
// list. Paths are relative to the manifest. A directory entry expands to its
// *.traj files in name order.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "elicit/core.hpp"
#include "elicit/formats.hpp"
#include "elicit/survey.hpp"

namespace elicit {

struct Diagnostic {
  enum class Kind { io, parse, validation };
  Kind kind = Kind::parse;
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;

  std::string to_string() const;
};

// Every problem found while loading, reported together.
class BundleError : public std::runtime_error {
 public:
  explicit BundleError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  // True when any problem is an unreadable or unparsable file (as opposed to
  // well-formed data that fails validation).
  bool has_parse_errors() const noexcept;

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct SourceFile {
  std::string name;  // as referenced (relative to the manifest)
  std::string content;
};

struct StudyBundle {
  std::filesystem::path manifest_path;  // empty for single-file inputs
  Study study;
  StudyDesign design = StudyDesign::classic;

  std::vector<ProposalTable> proposals;  // study referent order
  std::vector<SpeechTable> speech;       // study referent order
  std::vector<Trajectory> trajectories;  // load order
  std::optional<std::vector<TlxRecord>> tlx;
  std::optional<LikertData> likert;
  LikertScale likert_scale;

  // Manifest entries as written, for re-serialization.
  std::vector<std::string> proposal_files;
  std::vector<std::string> speech_files;
  std::vector<std::string> trajectory_entries;
  std::optional<std::string> tlx_file;
  std::optional<std::string> likert_file;

  // Manifest first, then data files in load order.
  std::vector<SourceFile> sources;
};

// Parses and validates a manifest and everything it references. Throws
// BundleError listing every problem found.
StudyBundle load_bundle(const std::filesystem::path& manifest);

// Accepts a manifest (.json) or a single data file: a proposal, speech, TLX
// or Likert CSV (recognised by its header) or a trajectory file. For a
// single file the study is inferred from the ids it mentions.
StudyBundle load_input(const std::filesystem::path& path);

// Builds and validates a bundle from in-memory parts (no files). The study
// is inferred from the data when `study` is empty.
StudyBundle make_bundle(std::optional<Study> study, std::vector<ProposalTable> proposals,
                        std::vector<SpeechTable> speech = {},
                        std::vector<Trajectory> trajectories = {},
                        std::optional<StudyDesign> design = std::nullopt);

nlohmann::ordered_json manifest_to_json(const StudyBundle& bundle);

// SHA-256 over every source file's name and bytes, hex encoded.
std::string input_hash(const StudyBundle& bundle);

}  // namespace elicit
