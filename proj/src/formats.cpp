#include "elicit/formats.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

// Maps header names to field positions; rejects unknown, duplicate and
// missing required columns.
class Columns {
 public:
  Columns(const CsvDocument& doc, const std::string& file,
          std::initializer_list<std::string_view> required,
          std::initializer_list<std::string_view> optional = {})
      : file_(file) {
    std::set<std::string_view> known(required);
    known.insert(optional.begin(), optional.end());
    for (std::size_t i = 0; i < doc.header.fields.size(); ++i) {
      const auto& f = doc.header.fields[i];
      if (!known.contains(f.text)) {
        throw ParseError(file, doc.header.line, f.column, "unknown column '" + f.text + "'");
      }
      if (!index_.emplace(f.text, i).second) {
        throw ParseError(file, doc.header.line, f.column, "duplicate column '" + f.text + "'");
      }
    }
    for (auto name : required) {
      if (!index_.contains(std::string(name))) {
        throw ParseError(file, doc.header.line, 1,
                         "missing required column '" + std::string(name) + "'");
      }
    }
  }

  bool has(const std::string& name) const { return index_.contains(name); }

  const CsvField& at(const CsvRow& row, const std::string& name) const {
    return row.fields[index_.at(name)];
  }

  const CsvField& non_empty(const CsvRow& row, const std::string& name) const {
    const auto& f = at(row, name);
    if (f.text.empty()) throw ParseError(file_, row.line, f.column, "empty " + name);
    return f;
  }

 private:
  std::string file_;
  std::map<std::string, std::size_t> index_;
};

template <typename Int>
Int parse_int(const CsvField& f, std::size_t line, const std::string& file, const char* what) {
  Int value{};
  const char* end = f.text.data() + f.text.size();
  const auto [ptr, ec] = std::from_chars(f.text.data(), end, value);
  if (ec != std::errc{} || ptr != end || f.text.empty()) {
    throw ParseError(file, line, f.column,
                     std::string("expected ") + what + ", got '" + f.text + "'");
  }
  return value;
}

bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

// Stable grouping by first appearance of the key.
template <typename Table, typename Entry>
void append_grouped(std::vector<Table>& tables, std::map<std::string, std::size_t>& slot,
                    const std::string& referent, Entry entry) {
  const auto [it, fresh] = slot.try_emplace(referent, tables.size());
  if (fresh) tables.push_back(Table{referent, {}});
  tables[it->second].entries.push_back(std::move(entry));
}

std::string pair_column(std::size_t a, std::size_t b) {
  return std::string(to_string(static_cast<TlxCategory>(a))) + "_vs_" +
         std::string(to_string(static_cast<TlxCategory>(b)));
}

}  // namespace

CsvDocument read_csv(std::string_view text, const std::string& file) {
  std::vector<CsvRow> records;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();

  while (i < n) {
    CsvRow row;
    row.line = line;
    bool row_done = false;
    while (!row_done) {
      while (i < n && is_blank(text[i]) && text[i] != '\r') {
        ++i;
        ++col;
      }
      CsvField field;
      field.column = col;
      if (i < n && text[i] == '"') {
        const std::size_t open_line = line, open_col = col;
        ++i;
        ++col;
        bool closed = false;
        while (i < n) {
          const char c = text[i];
          if (c == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              field.text.push_back('"');
              i += 2;
              col += 2;
              continue;
            }
            ++i;
            ++col;
            closed = true;
            break;
          }
          field.text.push_back(c);
          ++i;
          if (c == '\n') {
            ++line;
            col = 1;
          } else {
            ++col;
          }
        }
        if (!closed) throw ParseError(file, open_line, open_col, "unterminated quoted field");
        while (i < n && is_blank(text[i])) {
          ++i;
          ++col;
        }
        if (i < n && text[i] != ',' && text[i] != '\n') {
          throw ParseError(file, line, col, "unexpected character after closing quote");
        }
      } else {
        const std::size_t start = i;
        while (i < n && text[i] != ',' && text[i] != '\n') {
          if (text[i] == '"') throw ParseError(file, line, col, "stray quote in unquoted field");
          ++i;
          ++col;
        }
        field.text = std::string(trim(text.substr(start, i - start)));
      }
      row.fields.push_back(std::move(field));
      if (i < n && text[i] == ',') {
        ++i;
        ++col;
      } else {
        if (i < n) ++i;  // newline
        ++line;
        col = 1;
        row_done = true;
      }
    }
    const bool blank = row.fields.size() == 1 && row.fields.front().text.empty();
    if (!blank) records.push_back(std::move(row));
  }

  if (records.empty()) throw ParseError(file, 1, 1, "empty CSV document (no header)");
  CsvDocument doc;
  doc.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& row = records[r];
    if (row.fields.size() != doc.header.fields.size()) {
      const std::size_t column = row.fields.size() > doc.header.fields.size()
                                     ? row.fields[doc.header.fields.size()].column
                                     : row.fields.back().column;
      throw ParseError(file, row.line, column,
                       "expected " + std::to_string(doc.header.fields.size()) +
                           " fields, found " + std::to_string(row.fields.size()));
    }
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

std::string csv_escape(std::string_view field) {
  const bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos ||
                     (!field.empty() && (is_blank(field.front()) || is_blank(field.back())));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<ProposalTable> parse_proposals_csv(std::string_view text, const std::string& file) {
  const auto doc = read_csv(text, file);
  const Columns cols(doc, file, {"participant", "referent", "bin"}, {"trial"});
  std::vector<ProposalTable> tables;
  std::map<std::string, std::size_t> slot;
  for (const auto& row : doc.rows) {
    ProposalEntry e;
    e.participant = cols.non_empty(row, "participant").text;
    e.bin = cols.non_empty(row, "bin").text;
    if (cols.has("trial")) {
      e.trial = parse_int<std::size_t>(cols.at(row, "trial"), row.line, file,
                                       "a non-negative trial index");
    }
    append_grouped(tables, slot, cols.non_empty(row, "referent").text, std::move(e));
  }
  return tables;
}

std::string write_proposals_csv(const std::vector<ProposalTable>& tables) {
  std::string out = "participant,referent,trial,bin\n";
  for (const auto& t : tables) {
    for (const auto& e : t.entries) {
      out += csv_escape(e.participant) + "," + csv_escape(t.referent) + "," +
             std::to_string(e.trial) + "," + csv_escape(e.bin) + "\n";
    }
  }
  return out;
}

std::vector<SpeechTable> parse_speech_csv(std::string_view text, const std::string& file) {
  const auto doc = read_csv(text, file);
  const Columns cols(doc, file, {"participant", "referent", "utterance"});
  std::vector<SpeechTable> tables;
  std::map<std::string, std::size_t> slot;
  for (const auto& row : doc.rows) {
    SpeechEntry e{cols.non_empty(row, "participant").text, cols.non_empty(row, "utterance").text};
    append_grouped(tables, slot, cols.non_empty(row, "referent").text, std::move(e));
  }
  return tables;
}

std::string write_speech_csv(const std::vector<SpeechTable>& tables) {
  std::string out = "participant,referent,utterance\n";
  for (const auto& t : tables) {
    for (const auto& e : t.entries) {
      out += csv_escape(e.participant) + "," + csv_escape(t.referent) + "," +
             csv_escape(e.utterance) + "\n";
    }
  }
  return out;
}

Trajectory parse_trajectory(std::string_view text, const std::string& file) {
  Trajectory t;
  std::map<std::string, std::size_t> header_line;
  std::size_t joints = 0;
  bool in_frames = false;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::size_t offset = static_cast<std::size_t>(line.data() - raw.data()) + 1;

    const auto eq = line.find('=');
    if (!in_frames && eq != std::string_view::npos) {
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      const std::size_t lead = line.substr(eq + 1).find_first_not_of(" \t");
      const std::size_t value_col = offset + eq + 1 + (lead == std::string_view::npos ? 0 : lead);
      if (!header_line.emplace(key, line_no).second) {
        throw ParseError(file, line_no, offset, "duplicate header key '" + key + "'");
      }
      const CsvField field{value, value_col};
      if (key == "participant") {
        t.participant = value;
      } else if (key == "referent") {
        t.referent = value;
      } else if (key == "trial") {
        t.trial = parse_int<std::size_t>(field, line_no, file, "a non-negative trial index");
      } else if (key == "joints") {
        joints = parse_int<std::size_t>(field, line_no, file, "a positive joint count");
        if (joints == 0) throw ParseError(file, line_no, value_col, "joint count must be >= 1");
      } else if (key == "fps") {
        if (!parse_real(value, t.frame_rate) || !(t.frame_rate > 0.0)) {
          throw ParseError(file, line_no, value_col, "fps must be a positive number");
        }
      } else {
        throw ParseError(file, line_no, offset, "unknown header key '" + key + "'");
      }
      continue;
    }

    if (!in_frames) {
      for (const char* key : {"participant", "referent", "trial", "fps", "joints"}) {
        if (!header_line.contains(key)) {
          throw ParseError(file, line_no, 1,
                           std::string("missing header key '") + key + "' before frame data");
        }
      }
      if (t.participant.empty() || t.referent.empty()) {
        throw ParseError(file, header_line[t.participant.empty() ? "participant" : "referent"], 1,
                         "participant and referent must be non-empty");
      }
      in_frames = true;
    }

    Frame frame;
    frame.joints.reserve(joints);
    Point3 p{};
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_blank(line[i])) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && !is_blank(line[i])) ++i;
      double v = 0.0;
      if (!parse_real(line.substr(start, i - start), v) || !std::isfinite(v)) {
        throw ParseError(file, line_no, offset + start,
                         "expected a finite number, got '" +
                             std::string(line.substr(start, i - start)) + "'");
      }
      p[count % 3] = v;
      ++count;
      if (count % 3 == 0) frame.joints.push_back(p);
      if (count > joints * 3) {
        throw ParseError(file, line_no, offset + start,
                         "too many values: expected " + std::to_string(joints * 3));
      }
    }
    if (count != joints * 3) {
      throw ParseError(file, line_no, offset + line.size(),
                       "expected " + std::to_string(joints * 3) + " values, found " +
                           std::to_string(count));
    }
    t.frames.push_back(std::move(frame));
  }
  if (!in_frames) throw ParseError(file, line_no, 1, "trajectory has no frame data");
  return t;
}

std::string write_trajectory(const Trajectory& t) {
  std::string out;
  out += "participant = " + t.participant + "\n";
  out += "referent = " + t.referent + "\n";
  out += "trial = " + std::to_string(t.trial) + "\n";
  out += "fps = " + format_double(t.frame_rate) + "\n";
  out += "joints = " + std::to_string(t.joint_count()) + "\n";
  for (const auto& f : t.frames) {
    bool first = true;
    for (const auto& p : f.joints) {
      for (double v : p) {
        if (!first) out.push_back(' ');
        out += format_double(v);
        first = false;
      }
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<TlxRecord> parse_tlx_csv(std::string_view text, const std::string& file) {
  const auto doc = read_csv(text, file);

  // Header: participant, six ratings, and one column per pair in either
  // orientation.
  std::map<std::string, std::pair<std::size_t, std::size_t>> pair_of;
  for (std::size_t a = 0; a < kTlxCategoryCount; ++a) {
    for (std::size_t b = a + 1; b < kTlxCategoryCount; ++b) {
      pair_of[pair_column(a, b)] = {a, b};
      pair_of[pair_column(b, a)] = {a, b};
    }
  }
  std::size_t participant_col = doc.header.fields.size();
  std::array<std::size_t, kTlxCategoryCount> rating_col;
  rating_col.fill(doc.header.fields.size());
  std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> pair_cols;
  std::set<std::pair<std::size_t, std::size_t>> pairs_seen;
  for (std::size_t i = 0; i < doc.header.fields.size(); ++i) {
    const auto& f = doc.header.fields[i];
    if (f.text == "participant") {
      participant_col = i;
    } else if (auto c = parse_tlx_category(f.text)) {
      rating_col[static_cast<std::size_t>(*c)] = i;
    } else if (auto it = pair_of.find(f.text); it != pair_of.end()) {
      if (!pairs_seen.insert(it->second).second) {
        throw ParseError(file, doc.header.line, f.column, "duplicate pair column '" + f.text + "'");
      }
      pair_cols.emplace_back(i, it->second);
    } else {
      throw ParseError(file, doc.header.line, f.column, "unknown column '" + f.text + "'");
    }
  }
  if (participant_col == doc.header.fields.size()) {
    throw ParseError(file, doc.header.line, 1, "missing required column 'participant'");
  }
  for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
    if (rating_col[c] == doc.header.fields.size()) {
      throw ParseError(file, doc.header.line, 1,
                       "missing required column '" +
                           std::string(to_string(static_cast<TlxCategory>(c))) + "'");
    }
  }
  if (pair_cols.size() != kTlxPairCount) {
    for (std::size_t a = 0; a < kTlxCategoryCount; ++a) {
      for (std::size_t b = a + 1; b < kTlxCategoryCount; ++b) {
        if (!pairs_seen.contains({a, b})) {
          throw ParseError(file, doc.header.line, 1,
                           "missing required column '" + pair_column(a, b) + "'");
        }
      }
    }
  }

  std::vector<TlxRecord> out;
  for (const auto& row : doc.rows) {
    TlxRecord rec;
    rec.participant = row.fields[participant_col].text;
    if (rec.participant.empty()) {
      throw ParseError(file, row.line, row.fields[participant_col].column, "empty participant");
    }
    for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
      const auto& f = row.fields[rating_col[c]];
      const int v = parse_int<int>(f, row.line, file, "an integer rating 0..20");
      if (v < 0 || v > kTlxMaxRating) {
        throw ParseError(file, row.line, f.column, "rating " + f.text + " outside 0..20");
      }
      rec.response.ratings[c] = v;
    }
    for (const auto& [col, pair] : pair_cols) {
      const auto& f = row.fields[col];
      const auto winner = parse_tlx_category(f.text);
      const auto a = static_cast<TlxCategory>(pair.first);
      const auto b = static_cast<TlxCategory>(pair.second);
      if (!winner || (*winner != a && *winner != b)) {
        throw ParseError(file, row.line, f.column,
                         "winner must be '" + std::string(to_string(a)) + "' or '" +
                             std::string(to_string(b)) + "', got '" + f.text + "'");
      }
      rec.response.pairwise_choices.push_back({a, b, *winner});
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string write_tlx_csv(const std::vector<TlxRecord>& records) {
  std::string out = "participant";
  for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
    out += "," + std::string(to_string(static_cast<TlxCategory>(c)));
  }
  for (std::size_t a = 0; a < kTlxCategoryCount; ++a) {
    for (std::size_t b = a + 1; b < kTlxCategoryCount; ++b) out += "," + pair_column(a, b);
  }
  out += "\n";
  for (const auto& rec : records) {
    out += csv_escape(rec.participant);
    for (int r : rec.response.ratings) out += "," + std::to_string(r);
    for (std::size_t a = 0; a < kTlxCategoryCount; ++a) {
      for (std::size_t b = a + 1; b < kTlxCategoryCount; ++b) {
        std::string winner;
        for (const auto& ch : rec.response.pairwise_choices) {
          auto x = static_cast<std::size_t>(ch.first);
          auto y = static_cast<std::size_t>(ch.second);
          if (x > y) std::swap(x, y);
          if (x == a && y == b) winner = std::string(to_string(ch.winner));
        }
        out += "," + winner;
      }
    }
    out += "\n";
  }
  return out;
}

LikertData parse_likert_csv(std::string_view text, const std::string& file) {
  const auto doc = read_csv(text, file);
  const Columns cols(doc, file, {"participant", "question", "rating"});
  LikertData data;
  std::map<std::string, std::size_t> prow, qcol;
  std::map<std::pair<std::size_t, std::size_t>, int> cells;
  for (const auto& row : doc.rows) {
    const auto& p = cols.non_empty(row, "participant").text;
    const auto& q = cols.non_empty(row, "question").text;
    const int rating = parse_int<int>(cols.at(row, "rating"), row.line, file, "an integer rating");
    const auto [pit, pnew] = prow.try_emplace(p, data.participants.size());
    if (pnew) data.participants.push_back(p);
    const auto [qit, qnew] = qcol.try_emplace(q, data.questions.size());
    if (qnew) data.questions.push_back(q);
    if (!cells.emplace(std::pair{pit->second, qit->second}, rating).second) {
      throw ParseError(file, row.line, cols.at(row, "question").column,
                       "participant '" + p + "' rated question '" + q + "' more than once");
    }
  }
  data.ratings.assign(data.participants.size(), std::vector<int>(data.questions.size(), 0));
  for (std::size_t r = 0; r < data.participants.size(); ++r) {
    for (std::size_t q = 0; q < data.questions.size(); ++q) {
      const auto it = cells.find({r, q});
      if (it == cells.end()) {
        throw ParseError(file, 0, 0,
                         "participant '" + data.participants[r] + "' did not rate question '" +
                             data.questions[q] + "'");
      }
      data.ratings[r][q] = it->second;
    }
  }
  return data;
}

std::string write_likert_csv(const LikertData& data) {
  std::string out = "participant,question,rating\n";
  for (std::size_t r = 0; r < data.participants.size(); ++r) {
    for (std::size_t q = 0; q < data.questions.size(); ++q) {
      out += csv_escape(data.participants[r]) + "," + csv_escape(data.questions[q]) + "," +
             std::to_string(data.ratings[r][q]) + "\n";
    }
  }
  return out;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
  std::string out(buf.data());
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

}  // namespace elicit
