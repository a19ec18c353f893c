// elicit: command-line front end for the elicitation analysis toolkit.
//
// Exit codes: 0 success, 1 validation failure, 2 parse failure, 3 internal error.

#include <cmath>
#include <cstdio>
#include <map>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "elicit/agreement.hpp"
#include "elicit/bundle.hpp"
#include "elicit/errors.hpp"
#include "elicit/formats.hpp"
#include "elicit/monte_carlo.hpp"
#include "elicit/report.hpp"

namespace {

using namespace elicit;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitParse = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string input;
  std::string out;
  bool json = false;

  std::uint64_t seed = 0;
  double threshold = kDefaultConsensusThreshold;
  std::string tau_grid;
  std::size_t tau_points = kDefaultTauPoints;
  std::string zeta = "avg";
  std::size_t baseline = 1;
  std::size_t draws = 10000;
  std::size_t categories = 0;
  std::size_t participants = 0;
  std::string distribution = "uniform";
  double observed = -1.0;
  double tau = -1.0;
  double acceptance = 1.0;
  double fps = 25.0;
  bool normalize_dtw = false;
  std::string curves_csv;
  std::string samples_csv;
};

std::vector<double> parse_tau_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    std::size_t n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 || !(hi > lo)) {
      throw ParseError("--tau-grid", 0, 0, "expected start:stop:count, got '" + text + "'");
    }
    for (std::size_t i = 0; i < n; ++i) {
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    grid.back() = hi;
    return grid;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("--tau-grid", 0, 0, "not a number: '" + item + "'");
    }
  }
  return grid;
}

ReportConfig make_config(const Options& o) {
  ReportConfig cfg;
  cfg.seed = o.seed;
  cfg.threshold = o.threshold;
  if (!o.tau_grid.empty()) cfg.tau_grid = parse_tau_grid(o.tau_grid);
  cfg.tau_points = o.tau_points;
  cfg.zeta = parse_zeta(o.zeta);
  cfg.baseline = o.baseline;
  cfg.draws = o.draws;
  if (o.categories > 0) cfg.categories = o.categories;
  if (o.tau >= 0.0) cfg.cluster_tau = o.tau;
  cfg.cluster.acceptance_ratio = o.acceptance;
  cfg.preprocess.target_fps = o.fps;
  cfg.dtw.normalize_by_path_length = o.normalize_dtw;
  return cfg;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string section_json(const std::vector<ReportSection>& sections) {
  ojson j = ojson::object();
  for (const auto& s : sections) {
    ojson sj;
    sj["status"] = std::string(to_string(s.status));
    if (!s.message.empty()) sj[s.status == SectionStatus::error ? "error" : "notice"] = s.message;
    if (s.status == SectionStatus::ok) sj["data"] = s.data;
    j[s.name] = std::move(sj);
  }
  return j.dump(2) + "\n";
}

std::string section_notice(const ReportSection& s) {
  return s.name + ": " + std::string(to_string(s.status)) + (s.message.empty() ? "" : " (" + s.message + ")") + "\n";
}

int cmd_validate(const Options& o) {
  const auto b = load_input(o.input);
  std::string text = "valid: study '" + b.study.id + "', " + std::to_string(b.study.participants.size()) +
                     " participants, " + std::to_string(b.study.referents.size()) + " referents, " +
                     std::to_string(b.proposals.size()) + " proposal tables, " +
                     std::to_string(b.speech.size()) + " speech tables, " +
                     std::to_string(b.trajectories.size()) + " trajectories\n";
  if (o.json) {
    text = ojson{{"valid", true}, {"manifest", manifest_to_json(b)}}.dump(2) + "\n";
  }
  emit(o, text);
  return kExitOk;
}

int cmd_agreement(const Options& o) {
  const auto b = load_input(o.input);
  const auto cfg = make_config(o);
  const auto agreement = build_section("agreement", b, cfg);
  const auto chance = build_section("chance_agreement", b, cfg);
  if (o.json) {
    emit(o, section_json({agreement, chance}));
    return agreement.status == SectionStatus::error ? kExitValidation : kExitOk;
  }
  std::string text;
  if (agreement.status != SectionStatus::ok) {
    text += section_notice(agreement);
  } else {
    text += pad("referent", 24) + pad("N", 6) + pad("A(r)", 8) + "AR(r)\n";
    for (const auto& row : agreement.data["referents"]) {
      text += pad(row["referent"].get<std::string>(), 24);
      if (row.contains("error")) {
        text += "error: " + row["error"].get<std::string>() + "\n";
        continue;
      }
      text += pad(std::to_string(row["participants"].get<std::size_t>()), 6) +
              pad(row["display"]["agreement_index"].get<std::string>(), 8) +
              row["display"]["agreement_rate"].get<std::string>() + "\n";
    }
  }
  if (chance.status == SectionStatus::ok) {
    text += "chance agreement P_e=" + format_fixed(chance.data["p_e"].get<double>()) +
            " kappa=" + format_fixed(chance.data["kappa"].get<double>()) +
            " (m=" + std::to_string(chance.data["m"].get<std::size_t>()) +
            ", q=" + std::to_string(chance.data["q"].get<std::size_t>()) + ")\n";
  } else {
    text += section_notice(chance);
  }
  emit(o, text);
  return agreement.status == SectionStatus::error ? kExitValidation : kExitOk;
}

int cmd_speech(const Options& o) {
  const auto b = load_input(o.input);
  const auto s = build_section("speech", b, make_config(o));
  if (o.json) {
    emit(o, section_json({s}));
    return s.status == SectionStatus::error ? kExitValidation : kExitOk;
  }
  std::string text;
  if (s.status != SectionStatus::ok) {
    text = section_notice(s);
  } else {
    text += pad("referent", 24) + pad("N", 6) + pad("MC%", 10) + "CDR%\n";
    for (const auto& row : s.data["referents"]) {
      text += pad(row["referent"].get<std::string>(), 24);
      if (row.contains("error")) {
        text += "error: " + row["error"].get<std::string>() + "\n";
        continue;
      }
      text += pad(std::to_string(row["participants"].get<std::size_t>()), 6) +
              pad(format_fixed(row["max_consensus"].get<double>()), 10) +
              format_fixed(row["consensus_distinct_ratio"].get<double>()) + "\n";
    }
    text += "mean MC=" + format_fixed(s.data["mean_max_consensus"].get<double>()) +
            "% mean CDR=" + format_fixed(s.data["mean_consensus_distinct_ratio"].get<double>()) +
            "% (baseline " + std::to_string(o.baseline) + ")\n";
  }
  emit(o, text);
  return s.status == SectionStatus::error ? kExitValidation : kExitOk;
}

int cmd_dissimilarity(const Options& o) {
  const auto b = load_input(o.input);
  const auto cfg = make_config(o);
  if (!o.curves_csv.empty()) write_file(o.curves_csv, curves_to_csv(analyze_dissimilarity(b, cfg)));
  const auto s = build_section("dissimilarity", b, cfg);
  if (o.json) {
    emit(o, section_json({s}));
    return s.status == SectionStatus::error ? kExitValidation : kExitOk;
  }
  std::string text;
  if (s.status != SectionStatus::ok) {
    text = section_notice(s);
  } else {
    for (const auto& row : s.data["referents"]) {
      text += row["referent"].get<std::string>() + ":";
      if (row.contains("error")) {
        text += " error: " + row["error"].get<std::string>() + "\n";
        continue;
      }
      text += " max dissimilarity " + format_fixed(row["max_dissimilarity"].get<double>()) + "\n";
      for (const auto& smp : row["curve"]) {
        text += "  tau=" + pad(format_fixed(smp["tau"].get<double>()), 10) +
                "C=" + format_fixed(smp["consensus"].get<double>()) + "%\n";
      }
      if (!row["fit"].is_null()) {
        const auto& f = row["fit"];
        text += "  logistic fit: lower=" + format_fixed(f["lower"].get<double>()) +
                " upper=" + format_fixed(f["upper"].get<double>()) +
                " midpoint=" + format_fixed(f["midpoint"].get<double>()) +
                " steepness=" + format_fixed(f["steepness"].get<double>()) +
                " rss=" + format_fixed(f["rss"].get<double>()) +
                (f["converged"].get<bool>() ? " converged" : " not converged") + "\n";
      }
    }
  }
  emit(o, text);
  return s.status == SectionStatus::error ? kExitValidation : kExitOk;
}

int cmd_consensus(const Options& o) {
  const auto b = load_input(o.input);
  const auto cfg = make_config(o);
  std::vector<ReportSection> sections{build_section("consensus_set", b, cfg)};
  if (!b.trajectories.empty()) sections.push_back(build_section("dissimilarity", b, cfg));
  if (o.json) {
    emit(o, section_json(sections));
    return kExitOk;
  }
  std::string text;
  const auto& set = sections.front();
  if (set.status != SectionStatus::ok) {
    text += section_notice(set);
  } else {
    text += "consensus set (threshold " + format_fixed(set.data["threshold"].get<double>()) + ")\n";
    text += pad("referent", 24) + pad("top bin", 24) + pad("support", 9) + pad("AR(r)", 8) + "accepted\n";
    for (const auto& e : set.data["entries"]) {
      text += pad(e["referent"].get<std::string>(), 24) + pad(e["top_bin"].get<std::string>(), 24) +
              pad(std::to_string(e["support_count"].get<std::size_t>()), 9) +
              pad(format_fixed(e["agreement_rate"].get<double>()), 8) +
              (e["accepted"].get<bool>() ? "yes" : "no") +
              (e["tied_bins"].size() > 1 ? " (tie)" : "") + "\n";
    }
  }
  if (sections.size() > 1 && sections[1].status == SectionStatus::ok) {
    text += "consensus clusters\n";
    for (const auto& row : sections[1].data["referents"]) {
      if (!row.contains("cluster")) continue;
      const auto& c = row["cluster"];
      text += pad(row["referent"].get<std::string>(), 24) + "tau=" + format_fixed(c["tau"].get<double>()) +
              " (" + c["tau_source"].get<std::string>() + ") members=" +
              std::to_string(c["members"].size()) + " coverage=" + format_fixed(c["coverage"].get<double>()) +
              "%\n";
    }
  }
  emit(o, text);
  return kExitOk;
}

CategoryDistribution parse_distribution(const std::string& text) {
  if (text == "uniform") return UniformCategories{};
  if (text.rfind("zipf:", 0) == 0) return ZipfCategories{std::stod(text.substr(5))};
  if (text.rfind("weights:", 0) == 0) {
    EmpiricalCategories e;
    std::istringstream in(text.substr(8));
    std::string item;
    while (std::getline(in, item, ',')) e.weights.push_back(std::stod(item));
    return e;
  }
  throw ParseError("--distribution", 0, 0, "expected uniform, zipf:S or weights:w1,w2,..., got '" + text + "'");
}

int cmd_simulate(const Options& o) {
  NullModel model;
  model.participant_count = o.participants;
  model.category_count = o.categories;
  model.distribution = parse_distribution(o.distribution);
  model.seed = o.seed;
  const auto dist = simulate_null(model, o.draws);
  if (!o.samples_csv.empty()) write_file(o.samples_csv, null_samples_to_csv(dist));

  std::optional<double> p;
  if (o.observed >= 0.0) p = p_value(o.observed, dist);
  if (o.json) {
    ojson j{{"participants", model.participant_count},
            {"categories", model.category_count},
            {"distribution", o.distribution},
            {"draws", o.draws},
            {"seed", o.seed},
            {"expected_agreement_rate", expected_agreement_rate(model)},
            {"mean", dist.mean},
            {"variance", dist.variance},
            {"quantiles", {{"0.90", dist.q90}, {"0.95", dist.q95}, {"0.99", dist.q99}}}};
    if (p) {
      j["observed"] = o.observed;
      j["p_value"] = *p;
    }
    emit(o, j.dump(2) + "\n");
    return kExitOk;
  }
  std::string text = "null AR distribution: N=" + std::to_string(model.participant_count) +
                     " q=" + std::to_string(model.category_count) + " (" + o.distribution + "), " +
                     std::to_string(o.draws) + " draws, seed " + std::to_string(o.seed) + "\n";
  text += "expected " + format_fixed(expected_agreement_rate(model)) + "  mean " + format_fixed(dist.mean) +
          "  sd " + format_fixed(std::sqrt(dist.variance)) + "\n";
  text += "thresholds: 90% " + format_fixed(dist.q90) + "  95% " + format_fixed(dist.q95) + "  99% " +
          format_fixed(dist.q99) + "\n";
  if (p) text += "observed AR " + format_fixed(o.observed) + ": p = " + format_fixed(*p, 4) + "\n";
  emit(o, text);
  return kExitOk;
}

int cmd_survey(const Options& o) {
  const auto b = load_input(o.input);
  const auto s = build_section("survey", b, make_config(o));
  if (o.json) {
    emit(o, section_json({s}));
    return s.status == SectionStatus::error ? kExitValidation : kExitOk;
  }
  std::string text;
  if (s.status != SectionStatus::ok) {
    text = section_notice(s);
  } else {
    if (s.data.contains("tlx")) {
      text += "NASA TLX\n";
      for (const auto& r : s.data["tlx"]["responses"]) {
        text += pad(r["participant"].get<std::string>(), 16);
        text += r.contains("error") ? "error: " + r["error"].get<std::string>() + "\n"
                                    : "overall " + format_fixed(r["overall"].get<double>()) + "\n";
      }
      if (s.data["tlx"].contains("mean_overall")) {
        text += "mean overall " + format_fixed(s.data["tlx"]["mean_overall"].get<double>()) + "\n";
      }
    }
    if (s.data.contains("likert")) {
      text += "Likert\n";
      for (const auto& q : s.data["likert"]["questions"]) {
        std::string modes;
        for (const auto& m : q["modes"]) modes += (modes.empty() ? "" : ",") + std::to_string(m.get<int>());
        text += pad(q["question"].get<std::string>(), 16) + "mean " + format_fixed(q["mean"].get<double>()) +
                "  median " + format_fixed(q["median"].get<double>()) + "  mode " + modes + "  sd " +
                format_fixed(q["sd"].get<double>()) + "\n";
      }
    }
  }
  emit(o, text);
  return s.status == SectionStatus::error ? kExitValidation : kExitOk;
}

int cmd_report(const Options& o) {
  const auto b = load_input(o.input);
  const auto report = run_report(b, make_config(o));
  emit(o, serialize_report(report));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agreement and consensus analysis for elicitation studies"};
  app.require_subcommand(1);
  Options o;

  auto input = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "Study manifest (.json) or a single data file")->required();
    sub->add_option("--out", o.out, "Write output to this file instead of stdout");
    sub->add_flag("--json", o.json, "Machine-readable JSON output");
  };
  auto analysis = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed for simulations");
    sub->add_option("--threshold", o.threshold, "Consensus-set acceptance threshold on AR(r)");
    sub->add_option("--tau-grid", o.tau_grid, "Tau values: start:stop:count or a comma list");
    sub->add_option("--tau-points", o.tau_points, "Points in the default tau grid");
    sub->add_option("--zeta", o.zeta, "Production aggregator: min, max or avg")
        ->check(CLI::IsMember({"min", "max", "avg"}));
    sub->add_option("--baseline", o.baseline, "CDR support baseline");
    sub->add_option("--draws", o.draws, "Monte Carlo draws");
    sub->add_option("--categories", o.categories, "Category count q for the null model");
    sub->add_option("--tau", o.tau, "Tau for consensus-cluster extraction");
    sub->add_option("--acceptance", o.acceptance, "Cluster acceptance ratio in [0.5, 1]");
    sub->add_option("--fps", o.fps, "Trajectory resampling rate (Hz)");
    sub->add_flag("--normalize-dtw", o.normalize_dtw, "Divide DTW cost by warping path length");
  };

  std::map<CLI::App*, int (*)(const Options&)> handlers;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    auto* sub = app.add_subcommand(name, help);
    handlers[sub] = fn;
    return sub;
  };

  auto* validate = add("validate", "Parse and validate a bundle or data file", cmd_validate);
  input(validate);
  auto* agreement = add("agreement", "Agreement index, agreement rate and chance agreement", cmd_agreement);
  input(agreement);
  analysis(agreement);
  auto* speech = add("speech", "Max-consensus and consensus-distinct ratio", cmd_speech);
  input(speech);
  analysis(speech);
  auto* dissim = add("dissimilarity", "DTW dissimilarity-consensus curves", cmd_dissimilarity);
  input(dissim);
  analysis(dissim);
  dissim->add_option("--curves-csv", o.curves_csv, "Also write the curves as tidy CSV");
  auto* consensus = add("consensus", "Consensus set and consensus clusters", cmd_consensus);
  input(consensus);
  analysis(consensus);
  auto* simulate = add("simulate", "Monte Carlo null distribution of AR(r)", cmd_simulate);
  simulate->add_option("--participants", o.participants, "Participants N")->required();
  simulate->add_option("--categories", o.categories, "Category count q")->required();
  simulate->add_option("--draws", o.draws, "Number of draws");
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_option("--distribution", o.distribution, "uniform, zipf:S or weights:w1,w2,...");
  simulate->add_option("--observed", o.observed, "Observed AR(r) to compute a p-value for");
  simulate->add_option("--samples-csv", o.samples_csv, "Also write the samples as tidy CSV");
  simulate->add_option("--out", o.out, "Write output to this file instead of stdout");
  simulate->add_flag("--json", o.json, "Machine-readable JSON output");
  auto* survey = add("survey", "NASA TLX and Likert summaries", cmd_survey);
  input(survey);
  auto* report = add("report", "Full JSON report over a bundle", cmd_report);
  input(report);
  analysis(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    for (const auto& [sub, fn] : handlers) {
      if (sub->parsed()) return fn(o);
    }
    return kExitInternal;
  } catch (const BundleError& e) {
    std::cerr << e.what() << "\n";
    return e.has_parse_errors() ? kExitParse : kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
