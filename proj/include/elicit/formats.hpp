#pragma once

// Text formats read and written by the toolkit.
//
// Proposal table CSV    participant,referent,trial,bin   (trial optional, default 0)
// Speech table CSV      participant,referent,utterance
// NASA TLX CSV          participant, the six category names (0..20) and 15
//                       pair columns "<a>_vs_<b>" holding the winning category
// Likert CSV            participant,question,rating      (long format)
// Trajectory text       "key = value" header lines (participant, referent,
//                       trial, fps, joints), then one frame per line holding
//                       joints*3 whitespace-separated reals (x y z per joint).
//                       Lines starting with '#' and blank lines are ignored.
//
// Columns may appear in any order; unknown columns are rejected by name.
// All readers throw ParseError with the file name and 1-based line/column.

#include <string>
#include <string_view>
#include <vector>

#include "elicit/core.hpp"
#include "elicit/survey.hpp"

namespace elicit {

struct CsvField {
  std::string text;
  std::size_t column = 0;  // 1-based character offset of the field start
};

struct CsvRow {
  std::size_t line = 0;  // 1-based line the record starts on
  std::vector<CsvField> fields;
};

struct CsvDocument {
  CsvRow header;
  std::vector<CsvRow> rows;
};

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// doubled quotes and newlines. Fields are trimmed unless quoted. Blank lines
// are skipped. Every row must have as many fields as the header.
CsvDocument read_csv(std::string_view text, const std::string& file);

std::string csv_escape(std::string_view field);

std::vector<ProposalTable> parse_proposals_csv(std::string_view text, const std::string& file);
std::string write_proposals_csv(const std::vector<ProposalTable>& tables);

std::vector<SpeechTable> parse_speech_csv(std::string_view text, const std::string& file);
std::string write_speech_csv(const std::vector<SpeechTable>& tables);

Trajectory parse_trajectory(std::string_view text, const std::string& file);
std::string write_trajectory(const Trajectory& trajectory);

struct TlxRecord {
  ParticipantId participant;
  TlxResponse response;
};

std::vector<TlxRecord> parse_tlx_csv(std::string_view text, const std::string& file);
std::string write_tlx_csv(const std::vector<TlxRecord>& records);

struct LikertData {
  std::vector<ParticipantId> participants;  // row order
  std::vector<std::string> questions;       // column order
  std::vector<std::vector<int>> ratings;    // participants x questions
};

// Every participant must rate every question exactly once.
LikertData parse_likert_csv(std::string_view text, const std::string& file);
std::string write_likert_csv(const LikertData& data);

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

// Fixed-point text with `decimals` digits ("0.574").
std::string format_fixed(double value, int decimals = 3);

}  // namespace elicit
