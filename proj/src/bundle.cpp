#include "elicit/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "elicit/errors.hpp"

namespace elicit {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Kind = Diagnostic::Kind;

class Collector {
 public:
  void add(Kind kind, std::string file, std::size_t line, std::size_t column, std::string msg) {
    diags_.push_back({kind, std::move(file), line, column, std::move(msg)});
  }
  void add(const ParseError& e) {
    add(Kind::parse, e.file(), e.line(), e.column(), e.detail());
  }
  bool empty() const { return diags_.empty(); }
  void throw_if_any() {
    if (!diags_.empty()) throw BundleError(std::move(diags_));
  }

 private:
  std::vector<Diagnostic> diags_;
};

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Manifest values: a string or a list of strings.
std::vector<std::string> file_list(const json& node, const std::string& key,
                                   const std::string& manifest, Collector& diags) {
  std::vector<std::string> out;
  if (node.is_string()) {
    out.push_back(node.get<std::string>());
  } else if (node.is_array()) {
    for (const auto& v : node) {
      if (v.is_string()) {
        out.push_back(v.get<std::string>());
      } else {
        diags.add(Kind::parse, manifest, 0, 0, "'" + key + "' entries must be strings");
      }
    }
  } else {
    diags.add(Kind::parse, manifest, 0, 0, "'" + key + "' must be a string or a list of strings");
  }
  return out;
}

std::vector<std::string> string_list(const json& node, const std::string& key,
                                     const std::string& manifest, Collector& diags) {
  std::vector<std::string> out;
  if (!node.is_array()) {
    diags.add(Kind::parse, manifest, 0, 0, "'" + key + "' must be a list of strings");
    return out;
  }
  for (const auto& v : node) {
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else {
      diags.add(Kind::parse, manifest, 0, 0, "'" + key + "' entries must be strings");
    }
  }
  return out;
}

Study parse_study(const json& node, const std::string& manifest, Collector& diags) {
  Study study;
  if (!node.is_object()) {
    diags.add(Kind::parse, manifest, 0, 0, "'study' must be an object");
    return study;
  }
  for (const auto& [key, value] : node.items()) {
    if (key == "id") {
      if (value.is_string()) {
        study.id = value.get<std::string>();
      } else {
        diags.add(Kind::parse, manifest, 0, 0, "'study.id' must be a string");
      }
    } else if (key == "participants") {
      study.participants = string_list(value, "study.participants", manifest, diags);
    } else if (key == "referents") {
      study.referents = string_list(value, "study.referents", manifest, diags);
    } else if (key == "metadata") {
      if (!value.is_object()) {
        diags.add(Kind::parse, manifest, 0, 0, "'study.metadata' must be an object");
        continue;
      }
      for (const auto& [mk, mv] : value.items()) {
        if (mv.is_string()) {
          study.metadata[mk] = mv.get<std::string>();
        } else {
          diags.add(Kind::parse, manifest, 0, 0, "'study.metadata." + mk + "' must be a string");
        }
      }
    } else {
      diags.add(Kind::parse, manifest, 0, 0, "unknown key 'study." + key + "'");
    }
  }
  for (const char* required : {"id", "participants", "referents"}) {
    if (!node.contains(required)) {
      diags.add(Kind::parse, manifest, 0, 0, std::string("missing key 'study.") + required + "'");
    }
  }
  return study;
}

template <typename Table>
std::vector<Table> order_by_referent(std::vector<Table> tables, const Study& study) {
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < study.referents.size(); ++i) rank.emplace(study.referents[i], i);
  std::stable_sort(tables.begin(), tables.end(), [&](const Table& a, const Table& b) {
    const auto ra = rank.contains(a.referent) ? rank.at(a.referent) : rank.size();
    const auto rb = rank.contains(b.referent) ? rank.at(b.referent) : rank.size();
    return ra < rb;
  });
  return tables;
}

// Tables sharing a referent (e.g. split over two CSV files) are merged.
template <typename Table>
void merge_into(std::vector<Table>& into, std::vector<Table> more) {
  for (auto& t : more) {
    auto it = std::find_if(into.begin(), into.end(),
                           [&](const Table& x) { return x.referent == t.referent; });
    if (it == into.end()) {
      into.push_back(std::move(t));
    } else {
      it->entries.insert(it->entries.end(), t.entries.begin(), t.entries.end());
    }
  }
}

void validate_bundle(const StudyBundle& b, Collector& diags) {
  const std::string where = b.manifest_path.empty() ? std::string() : b.manifest_path.string();
  auto add_report = [&](const ValidationReport& report, const std::string& file) {
    for (const auto& v : report.violations) {
      diags.add(Kind::validation, file, 0, 0,
                std::string(to_string(v.kind)) + ": " + v.message);
    }
  };

  if (!b.proposals.empty()) {
    add_report(validate_study(b.study, b.proposals, b.design), where);
  } else {
    ValidationReport study_only = validate_study(b.study, {}, b.design);
    std::erase_if(study_only.violations, [](const Violation& v) {
      return v.kind == ViolationKind::missing_referent;
    });
    add_report(study_only, where);
  }
  if (!b.speech.empty()) add_report(validate_speech(b.study, b.speech), where);

  const std::set<std::string_view> participants(b.study.participants.begin(),
                                                b.study.participants.end());
  const std::set<std::string_view> referents(b.study.referents.begin(), b.study.referents.end());
  std::set<std::tuple<std::string_view, std::string_view, std::size_t>> keys;
  for (const auto& t : b.trajectories) {
    add_report(validate_trajectory(t), where);
    if (!participants.contains(t.participant)) {
      diags.add(Kind::validation, where, 0, 0,
                "unknown participant: trajectory participant '" + t.participant +
                    "' is not part of the study");
    }
    if (!referents.contains(t.referent)) {
      diags.add(Kind::validation, where, 0, 0,
                "unknown referent: trajectory referent '" + t.referent +
                    "' is not part of the study");
    }
    if (!keys.emplace(t.participant, t.referent, t.trial).second) {
      diags.add(Kind::validation, where, 0, 0,
                "duplicate entry: more than one trajectory for '" + t.participant + "' / '" +
                    t.referent + "' trial " + std::to_string(t.trial));
    }
  }
  if (b.tlx) {
    std::set<std::string_view> seen;
    for (const auto& r : *b.tlx) {
      if (!participants.contains(r.participant)) {
        diags.add(Kind::validation, b.tlx_file.value_or(where), 0, 0,
                  "unknown participant: TLX participant '" + r.participant + "'");
      }
      if (!seen.insert(r.participant).second) {
        diags.add(Kind::validation, b.tlx_file.value_or(where), 0, 0,
                  "duplicate entry: more than one TLX response for '" + r.participant + "'");
      }
    }
  }
  if (b.likert) {
    for (const auto& p : b.likert->participants) {
      if (!participants.contains(p)) {
        diags.add(Kind::validation, b.likert_file.value_or(where), 0, 0,
                  "unknown participant: Likert participant '" + p + "'");
      }
    }
    for (const auto& row : b.likert->ratings) {
      for (int v : row) {
        if (v < b.likert_scale.min || v > b.likert_scale.max) {
          diags.add(Kind::validation, b.likert_file.value_or(where), 0, 0,
                    "rating " + std::to_string(v) + " outside scale " +
                        std::to_string(b.likert_scale.min) + ".." +
                        std::to_string(b.likert_scale.max));
        }
      }
    }
  }
}

std::vector<fs::path> expand_trajectory_entry(const fs::path& root, const std::string& entry) {
  const fs::path p = root / entry;
  std::vector<fs::path> out;
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    for (const auto& de : fs::directory_iterator(p, ec)) {
      if (de.is_regular_file() && de.path().extension() == ".traj") out.push_back(de.path());
    }
    std::sort(out.begin(), out.end());
  } else {
    out.push_back(p);
  }
  return out;
}

Study infer_study(const StudyBundle& b) {
  Study s;
  s.id = "inferred";
  std::set<std::string> ps, rs;
  auto participant = [&](const std::string& p) {
    if (ps.insert(p).second) s.participants.push_back(p);
  };
  auto referent = [&](const std::string& r) {
    if (rs.insert(r).second) s.referents.push_back(r);
  };
  for (const auto& t : b.proposals) {
    referent(t.referent);
    for (const auto& e : t.entries) participant(e.participant);
  }
  for (const auto& t : b.speech) {
    referent(t.referent);
    for (const auto& e : t.entries) participant(e.participant);
  }
  for (const auto& t : b.trajectories) {
    referent(t.referent);
    participant(t.participant);
  }
  if (b.tlx) {
    for (const auto& r : *b.tlx) participant(r.participant);
  }
  if (b.likert) {
    for (const auto& p : b.likert->participants) participant(p);
  }
  return s;
}

StudyDesign infer_design(const StudyBundle& b) {
  for (const auto& t : b.proposals) {
    for (const auto& e : t.entries) {
      if (e.trial > 0) return StudyDesign::production;
    }
  }
  for (const auto& t : b.trajectories) {
    if (t.trial > 0) return StudyDesign::production;
  }
  return StudyDesign::classic;
}

std::string header_of(const std::string& text) {
  const auto nl = text.find('\n');
  std::string h = text.substr(0, nl);
  std::erase(h, '\r');
  std::erase(h, ' ');
  return h;
}

}  // namespace

std::string Diagnostic::to_string() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  if (line > 0) {
    out += ":" + std::to_string(line);
    if (column > 0) out += ":" + std::to_string(column);
  }
  const char* label = kind == Kind::io ? "io error" : kind == Kind::parse ? "parse error"
                                                                          : "validation";
  return out + ": " + label + ": " + message;
}

BundleError::BundleError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
        std::string msg = std::to_string(diagnostics.size()) + " problem(s) in study bundle";
        for (const auto& d : diagnostics) msg += "\n  " + d.to_string();
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

bool BundleError::has_parse_errors() const noexcept {
  return std::any_of(diagnostics_.begin(), diagnostics_.end(), [](const Diagnostic& d) {
    return d.kind != Diagnostic::Kind::validation;
  });
}

StudyBundle load_bundle(const fs::path& manifest) {
  Collector diags;
  const std::string mname = manifest.string();
  const auto text = read_file(manifest);
  if (!text) {
    diags.add(Kind::io, mname, 0, 0, "cannot read manifest");
    diags.throw_if_any();
  }

  json doc;
  try {
    doc = json::parse(*text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(*text, e.byte);
    std::string what = e.what();
    if (const auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
    diags.add(Kind::parse, mname, line, col, what);
    diags.throw_if_any();
  }
  if (!doc.is_object()) {
    diags.add(Kind::parse, mname, 1, 1, "manifest must be a JSON object");
    diags.throw_if_any();
  }

  StudyBundle b;
  b.manifest_path = manifest;
  b.sources.push_back({manifest.filename().string(), *text});
  const fs::path root = manifest.parent_path();

  auto load = [&](const std::string& name, const fs::path& path) -> std::optional<std::string> {
    auto content = read_file(path);
    if (!content) {
      diags.add(Kind::io, path.string(), 0, 0, "cannot read file referenced as '" + name + "'");
      return std::nullopt;
    }
    b.sources.push_back({name, *content});
    return content;
  };

  for (const auto& [key, value] : doc.items()) {
    if (key == "study") {
      b.study = parse_study(value, mname, diags);
    } else if (key == "design") {
      const auto d = value.is_string() ? value.get<std::string>() : std::string();
      if (d == "classic") {
        b.design = StudyDesign::classic;
      } else if (d == "production") {
        b.design = StudyDesign::production;
      } else {
        diags.add(Kind::parse, mname, 0, 0, "'design' must be \"classic\" or \"production\"");
      }
    } else if (key == "proposals") {
      b.proposal_files = file_list(value, key, mname, diags);
    } else if (key == "speech") {
      b.speech_files = file_list(value, key, mname, diags);
    } else if (key == "trajectories") {
      b.trajectory_entries = file_list(value, key, mname, diags);
    } else if (key == "surveys") {
      if (!value.is_object()) {
        diags.add(Kind::parse, mname, 0, 0, "'surveys' must be an object");
        continue;
      }
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "tlx" && sv.is_string()) {
          b.tlx_file = sv.get<std::string>();
        } else if (sk == "likert" && sv.is_object() && sv.contains("file") &&
                   sv["file"].is_string()) {
          b.likert_file = sv["file"].get<std::string>();
          if (sv.contains("scale")) {
            const auto& sc = sv["scale"];
            if (sc.is_array() && sc.size() == 2 && sc[0].is_number_integer() &&
                sc[1].is_number_integer() && sc[0].get<int>() <= sc[1].get<int>()) {
              b.likert_scale = {sc[0].get<int>(), sc[1].get<int>()};
            } else {
              diags.add(Kind::parse, mname, 0, 0,
                        "'surveys.likert.scale' must be [min, max] integers with min <= max");
            }
          }
          for (const auto& [lk, lv] : sv.items()) {
            if (lk != "file" && lk != "scale") {
              diags.add(Kind::parse, mname, 0, 0, "unknown key 'surveys.likert." + lk + "'");
            }
          }
        } else if (sk == "tlx" || sk == "likert") {
          diags.add(Kind::parse, mname, 0, 0,
                    "'surveys." + sk + "' must be " +
                        (sk == "tlx" ? "a file name" : "an object with a 'file' entry"));
        } else {
          diags.add(Kind::parse, mname, 0, 0, "unknown key 'surveys." + sk + "'");
        }
      }
    } else {
      diags.add(Kind::parse, mname, 0, 0, "unknown key '" + key + "'");
    }
  }
  if (!doc.contains("study")) diags.add(Kind::parse, mname, 0, 0, "missing key 'study'");

  for (const auto& name : b.proposal_files) {
    if (auto content = load(name, root / name)) {
      try {
        merge_into(b.proposals, parse_proposals_csv(*content, (root / name).string()));
      } catch (const ParseError& e) {
        diags.add(e);
      }
    }
  }
  for (const auto& name : b.speech_files) {
    if (auto content = load(name, root / name)) {
      try {
        merge_into(b.speech, parse_speech_csv(*content, (root / name).string()));
      } catch (const ParseError& e) {
        diags.add(e);
      }
    }
  }
  for (const auto& entry : b.trajectory_entries) {
    for (const auto& path : expand_trajectory_entry(root, entry)) {
      const std::string name = fs::relative(path, root).generic_string();
      if (auto content = load(name, path)) {
        try {
          b.trajectories.push_back(parse_trajectory(*content, path.string()));
        } catch (const ParseError& e) {
          diags.add(e);
        }
      }
    }
  }
  if (b.tlx_file) {
    if (auto content = load(*b.tlx_file, root / *b.tlx_file)) {
      try {
        b.tlx = parse_tlx_csv(*content, (root / *b.tlx_file).string());
      } catch (const ParseError& e) {
        diags.add(e);
      }
    }
  }
  if (b.likert_file) {
    if (auto content = load(*b.likert_file, root / *b.likert_file)) {
      try {
        b.likert = parse_likert_csv(*content, (root / *b.likert_file).string());
      } catch (const ParseError& e) {
        diags.add(e);
      }
    }
  }
  diags.throw_if_any();

  b.proposals = order_by_referent(std::move(b.proposals), b.study);
  b.speech = order_by_referent(std::move(b.speech), b.study);
  validate_bundle(b, diags);
  diags.throw_if_any();
  return b;
}

StudyBundle load_input(const fs::path& path) {
  if (path.extension() == ".json") return load_bundle(path);

  Collector diags;
  const auto text = read_file(path);
  if (!text) {
    diags.add(Kind::io, path.string(), 0, 0, "cannot read file");
    diags.throw_if_any();
  }
  StudyBundle b;
  b.sources.push_back({path.filename().string(), *text});
  const std::string name = path.string();
  try {
    if (path.extension() == ".traj") {
      b.trajectories.push_back(parse_trajectory(*text, name));
      b.trajectory_entries.push_back(path.filename().string());
    } else {
      const std::string header = header_of(*text);
      const auto has = [&](std::string_view col) {
        std::string_view h = header;
        std::size_t start = 0;
        while (start <= h.size()) {
          const auto comma = h.find(',', start);
          const auto field = h.substr(start, comma == std::string_view::npos ? h.npos : comma - start);
          if (field == col) return true;
          if (comma == std::string_view::npos) break;
          start = comma + 1;
        }
        return false;
      };
      if (has("bin")) {
        b.proposals = parse_proposals_csv(*text, name);
        b.proposal_files.push_back(path.filename().string());
      } else if (has("utterance")) {
        b.speech = parse_speech_csv(*text, name);
        b.speech_files.push_back(path.filename().string());
      } else if (has("question")) {
        b.likert = parse_likert_csv(*text, name);
        b.likert_file = path.filename().string();
        int lo = 0, hi = 0;
        bool first = true;
        for (const auto& row : b.likert->ratings) {
          for (int v : row) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
          }
        }
        b.likert_scale = {lo, hi};
      } else if (has("mental")) {
        b.tlx = parse_tlx_csv(*text, name);
        b.tlx_file = path.filename().string();
      } else {
        throw ParseError(name, 1, 1,
                         "unrecognised data file: header matches no known table format");
      }
    }
  } catch (const ParseError& e) {
    diags.add(e);
    diags.throw_if_any();
  }
  b.study = infer_study(b);
  b.design = infer_design(b);
  validate_bundle(b, diags);
  diags.throw_if_any();
  return b;
}

StudyBundle make_bundle(std::optional<Study> study, std::vector<ProposalTable> proposals,
                        std::vector<SpeechTable> speech, std::vector<Trajectory> trajectories,
                        std::optional<StudyDesign> design) {
  StudyBundle b;
  b.proposals = std::move(proposals);
  b.speech = std::move(speech);
  b.trajectories = std::move(trajectories);
  b.study = study ? std::move(*study) : infer_study(b);
  b.design = design ? *design : infer_design(b);
  b.proposals = order_by_referent(std::move(b.proposals), b.study);
  b.speech = order_by_referent(std::move(b.speech), b.study);
  // In-memory bundles hash their canonical serialization.
  b.sources.push_back({"proposals", write_proposals_csv(b.proposals)});
  b.sources.push_back({"speech", write_speech_csv(b.speech)});
  for (const auto& t : b.trajectories) b.sources.push_back({"trajectory", write_trajectory(t)});
  Collector diags;
  validate_bundle(b, diags);
  diags.throw_if_any();
  return b;
}

nlohmann::ordered_json manifest_to_json(const StudyBundle& b) {
  nlohmann::ordered_json j;
  j["study"]["id"] = b.study.id;
  j["study"]["participants"] = b.study.participants;
  j["study"]["referents"] = b.study.referents;
  j["study"]["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : b.study.metadata) j["study"]["metadata"][k] = v;
  j["design"] = b.design == StudyDesign::classic ? "classic" : "production";
  if (!b.proposal_files.empty()) j["proposals"] = b.proposal_files;
  if (!b.speech_files.empty()) j["speech"] = b.speech_files;
  if (!b.trajectory_entries.empty()) j["trajectories"] = b.trajectory_entries;
  if (b.tlx_file) j["surveys"]["tlx"] = *b.tlx_file;
  if (b.likert_file) {
    j["surveys"]["likert"]["file"] = *b.likert_file;
    j["surveys"]["likert"]["scale"] = {b.likert_scale.min, b.likert_scale.max};
  }
  return j;
}

std::string input_hash(const StudyBundle& b) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  for (const auto& s : b.sources) {
    const std::string head = s.name + '\0' + std::to_string(s.content.size()) + '\0';
    EVP_DigestUpdate(ctx.get(), head.data(), head.size());
    EVP_DigestUpdate(ctx.get(), s.content.data(), s.content.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace elicit
