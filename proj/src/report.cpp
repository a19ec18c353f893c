#include "elicit/report.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <set>

#include "elicit/errors.hpp"
#include "elicit/survey.hpp"

namespace elicit {

using ojson = nlohmann::ordered_json;

namespace {

std::string fraction_text(const Fraction& f) {
  return std::to_string(f.numerator) + "/" + std::to_string(f.denominator);
}

ojson key_json(const TrajectoryKey& k) { return ojson{{"participant", k.participant}, {"trial", k.trial}}; }

ojson fit_json(const LogisticFit& fit) {
  return ojson{{"lower", fit.params.lower},
               {"upper", fit.params.upper},
               {"midpoint", fit.params.midpoint},
               {"steepness", fit.params.steepness},
               {"rss", fit.rss},
               {"iterations", fit.iterations},
               {"converged", fit.converged},
               {"degenerate", fit.degenerate},
               {"lack_of_fit",
                {{"f_statistic", fit.test.f_statistic},
                 {"df_residual", fit.test.df_residual},
                 {"df_reference", fit.test.df_reference},
                 {"p_value", fit.test.p_value},
                 {"alpha", fit.test.alpha},
                 {"accepted", fit.test.accepted}}}};
}

ReportSection skipped(std::string_view name, std::string notice) {
  return ReportSection{std::string(name), SectionStatus::skipped, std::move(notice), ojson::object()};
}

ReportSection summary_section(const StudyBundle& b) {
  ReportSection s{"summary", SectionStatus::ok, {}, ojson::object()};
  s.data["study_id"] = b.study.id;
  s.data["design"] = b.design == StudyDesign::classic ? "classic" : "production";
  s.data["participants"] = b.study.participants.size();
  s.data["referents"] = b.study.referents.size();
  s.data["proposal_tables"] = b.proposals.size();
  s.data["speech_tables"] = b.speech.size();
  s.data["trajectories"] = b.trajectories.size();
  s.data["tlx_responses"] = b.tlx ? b.tlx->size() : 0;
  s.data["likert_respondents"] = b.likert ? b.likert->participants.size() : 0;
  ojson meta = ojson::object();
  for (const auto& [k, v] : b.study.metadata) meta[k] = v;
  s.data["metadata"] = meta;
  return s;
}

ReportSection agreement_section(const StudyBundle& b) {
  if (b.proposals.empty()) return skipped("agreement", "no proposal tables in bundle");
  if (b.design != StudyDesign::classic) {
    return skipped("agreement", "agreement index/rate need a classic design (one proposal per participant)");
  }
  ReportSection s{"agreement", SectionStatus::ok, {}, ojson::object()};
  ojson rows = ojson::array();
  for (const auto& table : b.proposals) {
    ojson row{{"referent", table.referent}};
    try {
      const auto score = score_referent(table);
      row["participants"] = table.entries.size();
      row["class_sizes"] = score.class_sizes;
      row["agreement_index"] = score.agreement_index;
      row["agreement_rate"] = score.agreement_rate;
      row["agreement_index_exact"] = fraction_text(score.agreement_index_exact);
      row["agreement_rate_exact"] = fraction_text(score.agreement_rate_exact);
      row["display"] = {{"agreement_index", format_fixed(score.agreement_index)},
                        {"agreement_rate", format_fixed(score.agreement_rate)}};
    } catch (const AnalysisError& e) {
      row["error"] = e.what();
    }
    rows.push_back(std::move(row));
  }
  s.data["referents"] = std::move(rows);
  return s;
}

ReportSection chance_section(const StudyBundle& b) {
  if (b.proposals.empty()) return skipped("chance_agreement", "no proposal tables in bundle");
  if (b.design != StudyDesign::classic) {
    return skipped("chance_agreement", "chance agreement needs a classic design");
  }
  ReportSection s{"chance_agreement", SectionStatus::ok, {}, ojson::object()};
  const auto ca = chance_agreement(b.proposals);
  s.data["m"] = ca.m();
  s.data["q"] = ca.q();
  s.data["p_e"] = ca.p_e;
  s.data["mean_agreement_rate"] = ca.mean_agreement_rate;
  s.data["kappa"] = ca.kappa;
  ojson pi = ojson::array();
  for (std::size_t k = 0; k < ca.q(); ++k) {
    pi.push_back({{"category", ca.categories[k]}, {"pi", ca.pi_k[k]}});
  }
  s.data["pi_k"] = std::move(pi);
  ojson counts = ojson::array();
  for (std::size_t i = 0; i < ca.m(); ++i) {
    counts.push_back({{"referent", ca.referents[i]}, {"n_i", ca.row_totals[i]}, {"n_ik", ca.counts[i]}});
  }
  s.data["counts"] = std::move(counts);
  s.data["display"] = {{"p_e", format_fixed(ca.p_e)}, {"kappa", format_fixed(ca.kappa)}};
  return s;
}

ReportSection consensus_set_section(const StudyBundle& b, const ReportConfig& cfg) {
  if (b.proposals.empty()) return skipped("consensus_set", "no proposal tables in bundle");
  if (b.design != StudyDesign::classic) {
    return skipped("consensus_set", "consensus set extraction needs a classic design");
  }
  ReportSection s{"consensus_set", SectionStatus::ok, {}, ojson::object()};
  const auto set = extract_consensus_set(b.proposals, cfg.threshold);
  s.data["threshold"] = set.threshold;
  ojson rows = ojson::array();
  std::size_t accepted = 0;
  for (const auto& e : set.entries) {
    rows.push_back({{"referent", e.referent},
                    {"top_bin", e.top_bin},
                    {"support_count", e.support_count},
                    {"agreement_rate", e.agreement_rate},
                    {"accepted", e.accepted},
                    {"tied_bins", e.tied_bins}});
    accepted += e.accepted ? 1 : 0;
  }
  s.data["entries"] = std::move(rows);
  s.data["accepted_count"] = accepted;
  return s;
}

ReportSection speech_section(const StudyBundle& b, const ReportConfig& cfg) {
  if (b.speech.empty()) return skipped("speech", "no speech tables in bundle");
  ReportSection s{"speech", SectionStatus::ok, {}, ojson::object()};
  s.data["baseline"] = cfg.baseline;
  ojson rows = ojson::array();
  double mc_sum = 0.0, cdr_sum = 0.0;
  std::size_t ok = 0;
  for (const auto& table : b.speech) {
    ojson row{{"referent", table.referent}};
    try {
      const double mc = max_consensus(table);
      const double cdr = consensus_distinct_ratio(table, cfg.baseline);
      row["participants"] = table.entries.size();
      row["max_consensus"] = mc;
      row["consensus_distinct_ratio"] = cdr;
      mc_sum += mc;
      cdr_sum += cdr;
      ++ok;
    } catch (const AnalysisError& e) {
      row["error"] = e.what();
    }
    rows.push_back(std::move(row));
  }
  s.data["referents"] = std::move(rows);
  if (ok > 0) {
    s.data["mean_max_consensus"] = mc_sum / static_cast<double>(ok);
    s.data["mean_consensus_distinct_ratio"] = cdr_sum / static_cast<double>(ok);
  }
  return s;
}

ReportSection dissimilarity_section(const StudyBundle& b, const ReportConfig& cfg) {
  if (b.trajectories.empty()) return skipped("dissimilarity", "no trajectories in bundle");
  ReportSection s{"dissimilarity", SectionStatus::ok, {}, ojson::object()};
  s.data["dtw_normalized"] = cfg.dtw.normalize_by_path_length;
  s.data["acceptance_ratio"] = cfg.cluster.acceptance_ratio;
  ojson rows = ojson::array();
  for (const auto& r : analyze_dissimilarity(b, cfg)) {
    ojson row{{"referent", r.referent}};
    if (!r.error.empty()) {
      row["error"] = r.error;
      rows.push_back(std::move(row));
      continue;
    }
    const auto& m = *r.matrix;
    ojson keys = ojson::array();
    for (const auto& k : m.order()) keys.push_back(key_json(k));
    row["trajectories"] = std::move(keys);
    ojson values = ojson::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      values.push_back(std::vector<double>(m.values().begin() + static_cast<std::ptrdiff_t>(i * m.size()),
                                           m.values().begin() + static_cast<std::ptrdiff_t>((i + 1) * m.size())));
    }
    row["matrix"] = std::move(values);
    row["max_dissimilarity"] = m.max_value();
    const auto& curve = *r.curve;
    row["zeta"] = curve.zeta ? ojson(std::string(to_string(*curve.zeta))) : ojson(nullptr);
    ojson samples = ojson::array();
    for (const auto& smp : curve.samples) samples.push_back({{"tau", smp.tau}, {"consensus", smp.consensus}});
    row["curve"] = std::move(samples);
    row["fit"] = curve.fit ? fit_json(*curve.fit) : ojson(nullptr);
    if (r.cluster) {
      ojson members = ojson::array();
      for (const auto& k : r.cluster->members) members.push_back(key_json(k));
      row["cluster"] = {{"tau", r.cluster->tau},
                        {"tau_source", r.tau_source},
                        {"members", std::move(members)},
                        {"agreement_ratio", r.cluster->agreement_ratio},
                        {"coverage", r.cluster->coverage}};
    }
    rows.push_back(std::move(row));
  }
  s.data["referents"] = std::move(rows);
  return s;
}

ReportSection simulation_section(const StudyBundle& b, const ReportConfig& cfg) {
  std::size_t q = 0;
  std::string source;
  if (cfg.categories) {
    q = *cfg.categories;
    source = "configured";
  } else if (!b.proposals.empty()) {
    std::set<std::string> bins;
    for (const auto& t : b.proposals) {
      for (const auto& e : t.entries) bins.insert(normalize_bin(e.bin));
    }
    q = bins.size();
    source = "observed distinct bins";
  } else {
    return skipped("simulation", "no category count configured and no proposal tables to infer one from");
  }

  ReportSection s{"simulation", SectionStatus::ok, {}, ojson::object()};
  NullModel model;
  model.participant_count = b.study.participants.size();
  model.category_count = q;
  model.seed = cfg.seed;
  const auto dist = simulate_null(model, cfg.draws, cfg.threads);
  s.data["participants"] = model.participant_count;
  s.data["categories"] = q;
  s.data["categories_source"] = source;
  s.data["distribution"] = "uniform";
  s.data["draws"] = cfg.draws;
  s.data["seed"] = cfg.seed;
  s.data["expected_agreement_rate"] = expected_agreement_rate(model);
  s.data["mean"] = dist.mean;
  s.data["variance"] = dist.variance;
  s.data["quantiles"] = {{"0.90", dist.q90}, {"0.95", dist.q95}, {"0.99", dist.q99}};

  if (!b.proposals.empty() && b.design == StudyDesign::classic) {
    ojson rows = ojson::array();
    for (const auto& t : b.proposals) {
      ojson row{{"referent", t.referent}};
      try {
        const double ar = agreement_rate(t);
        row["agreement_rate"] = ar;
        row["p_value"] = p_value(ar, dist);
      } catch (const AnalysisError& e) {
        row["error"] = e.what();
      }
      rows.push_back(std::move(row));
    }
    s.data["referents"] = std::move(rows);
  }
  return s;
}

ReportSection survey_section(const StudyBundle& b) {
  if (!b.tlx && !b.likert) return skipped("survey", "no survey files in bundle");
  ReportSection s{"survey", SectionStatus::ok, {}, ojson::object()};
  if (b.tlx) {
    ojson rows = ojson::array();
    std::array<double, kTlxCategoryCount> cat_sum{};
    double overall_sum = 0.0;
    std::size_t ok = 0;
    for (const auto& rec : *b.tlx) {
      ojson row{{"participant", rec.participant}};
      try {
        const auto score = score_tlx(rec.response);
        ojson cats = ojson::object();
        for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
          cats[std::string(to_string(static_cast<TlxCategory>(c)))] = score.per_category[c];
          cat_sum[c] += score.per_category[c];
        }
        row["per_category"] = std::move(cats);
        row["weights"] = score.weights;
        row["overall"] = score.overall;
        overall_sum += score.overall;
        ++ok;
      } catch (const AnalysisError& e) {
        row["error"] = e.what();
      }
      rows.push_back(std::move(row));
    }
    ojson tlx{{"responses", std::move(rows)}};
    if (ok > 0) {
      ojson means = ojson::object();
      for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
        means[std::string(to_string(static_cast<TlxCategory>(c)))] = cat_sum[c] / static_cast<double>(ok);
      }
      tlx["mean_per_category"] = std::move(means);
      tlx["mean_overall"] = overall_sum / static_cast<double>(ok);
    }
    s.data["tlx"] = std::move(tlx);
  }
  if (b.likert) {
    const auto summary = summarize_likert(b.likert->ratings, b.likert_scale);
    ojson qs = ojson::array();
    for (std::size_t q = 0; q < summary.questions.size(); ++q) {
      const auto& qs_ = summary.questions[q];
      qs.push_back({{"question", b.likert->questions[q]},
                    {"respondents", qs_.respondents},
                    {"mean", qs_.mean},
                    {"median", qs_.median},
                    {"modes", qs_.modes},
                    {"sd", qs_.sd},
                    {"histogram", qs_.histogram}});
    }
    s.data["likert"] = {{"scale", {b.likert_scale.min, b.likert_scale.max}}, {"questions", std::move(qs)}};
  }
  return s;
}

}  // namespace

std::string_view to_string(SectionStatus status) {
  switch (status) {
    case SectionStatus::ok: return "ok";
    case SectionStatus::skipped: return "skipped";
    case SectionStatus::error: return "error";
  }
  return "?";
}

const ReportSection* StudyReport::section(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<DissimilarityResult> analyze_dissimilarity(const StudyBundle& b, const ReportConfig& cfg) {
  std::map<std::string, std::vector<const Trajectory*>> by_referent;
  for (const auto& t : b.trajectories) by_referent[t.referent].push_back(&t);

  std::vector<DissimilarityResult> out;
  for (const auto& referent : b.study.referents) {
    const auto it = by_referent.find(referent);
    if (it == by_referent.end()) continue;
    DissimilarityResult r;
    r.referent = referent;
    try {
      auto group = it->second;
      std::stable_sort(group.begin(), group.end(), [](const Trajectory* x, const Trajectory* y) {
        return std::tie(x->participant, x->trial) < std::tie(y->participant, y->trial);
      });
      std::vector<Trajectory> prepared;
      std::set<std::string_view> participants;
      bool repeated = false;
      for (const auto* t : group) {
        prepared.push_back(preprocess(*t, cfg.preprocess));
        repeated |= !participants.insert(t->participant).second;
      }
      r.matrix = dissimilarity_matrix(prepared, cfg.dtw);
      const auto grid = cfg.tau_grid ? *cfg.tau_grid : default_tau_grid(*r.matrix, cfg.tau_points);
      const std::optional<Zeta> zeta =
          (repeated || b.design == StudyDesign::production) ? std::optional<Zeta>(cfg.zeta) : std::nullopt;
      r.curve = sweep_tau(*r.matrix, grid, zeta, LogisticFitOptions{.alpha = cfg.fit_alpha});

      double tau = grid[grid.size() / 2];
      r.tau_source = "grid middle";
      if (cfg.cluster_tau) {
        tau = *cfg.cluster_tau;
        r.tau_source = "configured";
      } else if (r.curve->fit && r.curve->fit->converged && r.curve->fit->params.midpoint >= grid.front() &&
                 r.curve->fit->params.midpoint <= grid.back()) {
        tau = r.curve->fit->params.midpoint;
        r.tau_source = "fitted midpoint";
      }
      r.cluster = extract_cluster(*r.matrix, tau, cfg.cluster);
    } catch (const AnalysisError& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

ReportSection build_section(std::string_view name, const StudyBundle& bundle, const ReportConfig& cfg) {
  try {
    if (name == "summary") return summary_section(bundle);
    if (name == "agreement") return agreement_section(bundle);
    if (name == "chance_agreement") return chance_section(bundle);
    if (name == "consensus_set") return consensus_set_section(bundle, cfg);
    if (name == "speech") return speech_section(bundle, cfg);
    if (name == "dissimilarity") return dissimilarity_section(bundle, cfg);
    if (name == "simulation") return simulation_section(bundle, cfg);
    if (name == "survey") return survey_section(bundle);
  } catch (const std::exception& e) {
    return ReportSection{std::string(name), SectionStatus::error, e.what(), ojson::object()};
  }
  throw std::invalid_argument("unknown report section '" + std::string(name) + "'");
}

ojson config_to_json(const ReportConfig& cfg) {
  ojson j;
  j["seed"] = cfg.seed;
  j["threshold"] = cfg.threshold;
  j["tau_grid"] = cfg.tau_grid ? ojson(*cfg.tau_grid) : ojson(nullptr);
  j["tau_points"] = cfg.tau_points;
  j["zeta"] = std::string(to_string(cfg.zeta));
  j["baseline"] = cfg.baseline;
  j["draws"] = cfg.draws;
  j["categories"] = cfg.categories ? ojson(*cfg.categories) : ojson(nullptr);
  j["cluster_tau"] = cfg.cluster_tau ? ojson(*cfg.cluster_tau) : ojson(nullptr);
  j["acceptance_ratio"] = cfg.cluster.acceptance_ratio;
  j["preprocess"] = {{"target_fps", cfg.preprocess.target_fps},
                     {"normalize_height", cfg.preprocess.normalize_height},
                     {"translate_to_origin", cfg.preprocess.translate_to_origin},
                     {"reference_joint", cfg.preprocess.reference_joint},
                     {"vertical_axis", cfg.preprocess.vertical_axis}};
  j["dtw_normalized"] = cfg.dtw.normalize_by_path_length;
  j["fit_alpha"] = cfg.fit_alpha;
  return j;
}

StudyReport run_report(const StudyBundle& bundle, const ReportConfig& cfg) {
  StudyReport report;
  report.study_id = bundle.study.id;
  report.input_hash = input_hash(bundle);
  report.config = config_to_json(cfg);

  std::vector<std::future<ReportSection>> pending;
  for (auto name : kSectionNames) {
    pending.push_back(std::async(std::launch::async, [name, &bundle, &cfg] {
      return build_section(name, bundle, cfg);
    }));
  }
  for (auto& f : pending) report.sections.push_back(f.get());
  return report;
}

ojson to_json(const StudyReport& report) {
  ojson j;
  j["toolkit"] = report.toolkit;
  j["version"] = report.version;
  j["study_id"] = report.study_id;
  j["input_hash"] = report.input_hash;
  j["config"] = report.config;
  ojson sections = ojson::object();
  for (const auto& s : report.sections) {
    ojson sj;
    sj["status"] = std::string(to_string(s.status));
    if (!s.message.empty()) sj[s.status == SectionStatus::error ? "error" : "notice"] = s.message;
    if (s.status == SectionStatus::ok) sj["data"] = s.data;
    sections[s.name] = std::move(sj);
  }
  j["sections"] = std::move(sections);
  return j;
}

std::string serialize_report(const StudyReport& report) { return to_json(report).dump(2) + "\n"; }

std::string curves_to_csv(const std::vector<DissimilarityResult>& results) {
  std::string out = "referent,zeta,tau,consensus\n";
  for (const auto& r : results) {
    if (!r.curve) continue;
    const std::string zeta = r.curve->zeta ? std::string(to_string(*r.curve->zeta)) : "classic";
    for (const auto& smp : r.curve->samples) {
      out += csv_escape(r.referent) + "," + zeta + "," + format_double(smp.tau) + "," +
             format_double(smp.consensus) + "\n";
    }
  }
  return out;
}

std::string null_samples_to_csv(const NullDistribution& dist) {
  std::string out = "draw,agreement_rate\n";
  for (std::size_t i = 0; i < dist.samples.size(); ++i) {
    out += std::to_string(i) + "," + format_double(dist.samples[i]) + "\n";
  }
  return out;
}

}  // namespace elicit
