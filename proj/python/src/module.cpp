#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "elicit/agreement.hpp"
#include "elicit/bundle.hpp"
#include "elicit/cluster.hpp"
#include "elicit/consensus.hpp"
#include "elicit/errors.hpp"
#include "elicit/logistic.hpp"
#include "elicit/monte_carlo.hpp"
#include "elicit/report.hpp"
#include "elicit/survey.hpp"
#include "elicit/trajectory.hpp"

namespace py = pybind11;
using namespace elicit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ProposalTable labels_to_table(const std::vector<std::string>& labels, const std::string& referent) {
  ProposalTable t{referent, {}};
  for (std::size_t i = 0; i < labels.size(); ++i)
    t.entries.push_back({"p" + std::to_string(i), 0, labels[i]});
  return t;
}

SpeechTable utterances_to_table(const std::vector<std::string>& utterances) {
  SpeechTable t{"r", {}};
  for (std::size_t i = 0; i < utterances.size(); ++i)
    t.entries.push_back({"p" + std::to_string(i), utterances[i]});
  return t;
}

Trajectory to_trajectory(const Array& frames, double fps, const std::string& participant,
                         std::size_t trial) {
  if (frames.ndim() != 3 || frames.shape(2) != 3)
    throw py::value_error("trajectory must have shape (frames, joints, 3)");
  Trajectory t{participant, "r", trial, {}, fps};
  const auto v = frames.unchecked<3>();
  for (py::ssize_t f = 0; f < v.shape(0); ++f) {
    Frame frame;
    for (py::ssize_t j = 0; j < v.shape(1); ++j) frame.joints.push_back({v(f, j, 0), v(f, j, 1), v(f, j, 2)});
    t.frames.push_back(std::move(frame));
  }
  return t;
}

Array from_trajectory(const Trajectory& t) {
  const auto n = static_cast<py::ssize_t>(t.frames.size());
  const auto j = static_cast<py::ssize_t>(t.joint_count());
  Array out({n, j, py::ssize_t{3}});
  auto v = out.mutable_unchecked<3>();
  for (py::ssize_t f = 0; f < n; ++f)
    for (py::ssize_t k = 0; k < j; ++k)
      for (py::ssize_t c = 0; c < 3; ++c) v(f, k, c) = t.frames[f].joints[k][c];
  return out;
}

DissimilarityMatrix to_matrix(const Array& values, std::optional<std::vector<std::string>> participants) {
  if (values.ndim() != 2 || values.shape(0) != values.shape(1))
    throw py::value_error("dissimilarity matrix must be square");
  const auto n = static_cast<std::size_t>(values.shape(0));
  std::vector<TrajectoryKey> order;
  std::map<std::string, std::size_t> trials;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = participants ? participants->at(i) : "p" + std::to_string(i);
    order.push_back({p, trials[p]++});
  }
  return DissimilarityMatrix("r", std::move(order), std::vector<double>(values.data(), values.data() + n * n));
}

py::dict fit_to_dict(const LogisticFit& fit) {
  py::dict d;
  d["lower"] = fit.params.lower;
  d["upper"] = fit.params.upper;
  d["midpoint"] = fit.params.midpoint;
  d["steepness"] = fit.params.steepness;
  d["rss"] = fit.rss;
  d["iterations"] = fit.iterations;
  d["converged"] = fit.converged;
  d["degenerate"] = fit.degenerate;
  d["f_statistic"] = fit.test.f_statistic;
  d["p_value"] = fit.test.p_value;
  d["accepted"] = fit.test.accepted;
  return d;
}

CategoryDistribution parse_distribution(const std::string& name, double exponent,
                                        std::optional<std::vector<double>> weights) {
  if (name == "uniform") return UniformCategories{};
  if (name == "zipf") return ZipfCategories{exponent};
  if (name == "empirical") {
    if (!weights) throw py::value_error("empirical distribution needs weights");
    return EmpiricalCategories{*weights};
  }
  throw py::value_error("distribution must be 'uniform', 'zipf' or 'empirical'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Agreement, consensus and survey metrics for elicitation studies";
  m.attr("__version__") = std::string(kToolkitVersion);

  py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BundleError>(m, "BundleError", PyExc_ValueError);

  m.def("agreement_index", [](const std::vector<std::size_t>& sizes) { return agreement_index(sizes); },
        py::arg("class_sizes"));
  m.def("agreement_rate", [](const std::vector<std::size_t>& sizes) { return agreement_rate(sizes); },
        py::arg("class_sizes"));
  m.def("agreement_rate_exact", [](const std::vector<std::size_t>& sizes) {
        const auto f = agreement_rate_exact(sizes);
        return std::make_pair(f.numerator, f.denominator);
      }, py::arg("class_sizes"), "Unreduced (numerator, denominator).");
  m.def("agreement_index_exact", [](const std::vector<std::size_t>& sizes) {
        const auto f = agreement_index_exact(sizes);
        return std::make_pair(f.numerator, f.denominator);
      }, py::arg("class_sizes"));
  m.def("score_labels", [](const std::vector<std::string>& labels) {
        const auto s = score_referent(labels_to_table(labels, "r"));
        py::dict d;
        d["agreement_index"] = s.agreement_index;
        d["agreement_rate"] = s.agreement_rate;
        d["class_sizes"] = s.class_sizes;
        return d;
      }, py::arg("labels"), "Agreement for one referent given each participant's bin label.");

  m.def("chance_agreement", [](const std::vector<std::vector<std::string>>& referents) {
        std::vector<ProposalTable> tables;
        for (std::size_t i = 0; i < referents.size(); ++i)
          tables.push_back(labels_to_table(referents[i], "r" + std::to_string(i)));
        const auto c = chance_agreement(tables);
        py::dict d;
        d["p_e"] = c.p_e;
        d["kappa"] = c.kappa;
        d["mean_agreement_rate"] = c.mean_agreement_rate;
        py::dict pi;
        for (std::size_t k = 0; k < c.q(); ++k) pi[py::str(c.categories[k])] = c.pi_k[k];
        d["pi"] = pi;
        return d;
      }, py::arg("referents"), "Rows are referents; each row lists participants' bin labels in a fixed order.");

  m.def("max_consensus", [](const std::vector<std::string>& u) { return max_consensus(utterances_to_table(u)); },
        py::arg("utterances"));
  m.def("consensus_distinct_ratio", [](const std::vector<std::string>& u, std::size_t baseline) {
        return consensus_distinct_ratio(utterances_to_table(u), baseline);
      }, py::arg("utterances"), py::arg("baseline") = 1);
  m.def("bonferroni", &bonferroni, py::arg("alpha"), py::arg("test_count"));

  m.def("preprocess", [](const Array& frames, double fps, double target_fps, bool normalize_height,
                         bool translate_to_origin, std::size_t reference_joint, std::size_t vertical_axis) {
        PreprocessConfig cfg{target_fps, normalize_height, translate_to_origin, reference_joint, vertical_axis};
        return from_trajectory(preprocess(to_trajectory(frames, fps, "p", 0), cfg));
      }, py::arg("frames"), py::arg("fps"), py::arg("target_fps") = 25.0, py::arg("normalize_height") = true,
      py::arg("translate_to_origin") = true, py::arg("reference_joint") = 0, py::arg("vertical_axis") = 1);
  m.def("dtw_distance", [](const Array& a, const Array& b, bool normalize) {
        return dtw_distance(to_trajectory(a, 25.0, "a", 0), to_trajectory(b, 25.0, "b", 0), {normalize});
      }, py::arg("a"), py::arg("b"), py::arg("normalize") = false);
  m.def("dissimilarity_matrix", [](const std::vector<Array>& trajectories, bool normalize) {
        std::vector<Trajectory> ts;
        for (std::size_t i = 0; i < trajectories.size(); ++i)
          ts.push_back(to_trajectory(trajectories[i], 25.0, "p" + std::to_string(i), 0));
        const auto mtx = dissimilarity_matrix(ts, {normalize});
        const auto n = static_cast<py::ssize_t>(mtx.size());
        Array out({n, n});
        std::copy(mtx.values().begin(), mtx.values().end(), out.mutable_data());
        return out;
      }, py::arg("trajectories"), py::arg("normalize") = false);

  m.def("consensus_at", [](const Array& matrix, double tau) { return consensus_at(to_matrix(matrix, std::nullopt), tau); },
        py::arg("matrix"), py::arg("tau"));
  m.def("production_consensus_at", [](const Array& matrix, const std::vector<std::string>& participants,
                                      double tau, const std::string& zeta) {
        return production_consensus_at(to_matrix(matrix, participants), tau, parse_zeta(zeta));
      }, py::arg("matrix"), py::arg("participants"), py::arg("tau"), py::arg("zeta") = "avg",
      "participants[i] names the participant who produced trajectory i.");
  m.def("sweep_tau", [](const Array& matrix, std::optional<std::vector<double>> grid,
                        std::optional<std::vector<std::string>> participants, std::optional<std::string> zeta) {
        const auto mtx = to_matrix(matrix, participants);
        const auto g = grid ? *grid : default_tau_grid(mtx);
        const auto curve = sweep_tau(mtx, g, zeta ? std::optional(parse_zeta(*zeta)) : std::nullopt);
        std::vector<double> taus, values;
        for (const auto& s : curve.samples) {
          taus.push_back(s.tau);
          values.push_back(s.consensus);
        }
        py::dict d;
        d["tau"] = taus;
        d["consensus"] = values;
        d["fit"] = curve.fit ? py::object(fit_to_dict(*curve.fit)) : py::none();
        return d;
      }, py::arg("matrix"), py::arg("grid") = py::none(), py::arg("participants") = py::none(),
      py::arg("zeta") = py::none());
  m.def("fit_logistic", [](const std::vector<double>& x, const std::vector<double>& y, double alpha) {
        return fit_to_dict(fit_logistic(x, y, {500, alpha}));
      }, py::arg("x"), py::arg("y"), py::arg("alpha") = 0.05);
  m.def("extract_cluster", [](const Array& matrix, double tau, double acceptance_ratio) {
        const auto c = extract_cluster(to_matrix(matrix, std::nullopt), tau, {acceptance_ratio});
        py::dict d;
        d["members"] = c.member_indices;
        d["agreement_ratio"] = c.agreement_ratio;
        d["coverage"] = c.coverage;
        return d;
      }, py::arg("matrix"), py::arg("tau"), py::arg("acceptance_ratio") = 1.0);

  m.def("simulate_null", [](std::size_t participants, std::size_t categories, std::size_t draws,
                            std::uint64_t seed, const std::string& distribution, double exponent,
                            std::optional<std::vector<double>> weights) {
        const NullModel model{participants, categories, parse_distribution(distribution, exponent, weights), seed};
        const auto dist = simulate_null(model, draws);
        py::dict d;
        d["samples"] = py::array_t<double>(static_cast<py::ssize_t>(dist.samples.size()), dist.samples.data());
        d["mean"] = dist.mean;
        d["variance"] = dist.variance;
        d["q90"] = dist.q90;
        d["q95"] = dist.q95;
        d["q99"] = dist.q99;
        return d;
      }, py::arg("participants") = 20, py::arg("categories") = 10, py::arg("draws") = 10000,
      py::arg("seed") = 0, py::arg("distribution") = "uniform", py::arg("exponent") = 1.0,
      py::arg("weights") = py::none());
  m.def("p_value", [](double observed, const std::vector<double>& samples) {
        NullDistribution d;
        d.samples = samples;
        return p_value(observed, d);
      }, py::arg("observed_ar"), py::arg("samples"));

  m.def("score_tlx", [](const std::map<std::string, int>& ratings,
                        const std::vector<std::tuple<std::string, std::string, std::string>>& choices) {
        const auto cat = [](const std::string& s) {
          const auto c = parse_tlx_category(s);
          if (!c) throw py::value_error("unknown TLX category '" + s + "'");
          return *c;
        };
        TlxResponse r;
        if (ratings.size() != kTlxCategoryCount) throw py::value_error("ratings need all 6 categories");
        for (const auto& [name, v] : ratings) r.ratings[static_cast<std::size_t>(cat(name))] = v;
        for (const auto& [a, b, w] : choices) r.pairwise_choices.push_back({cat(a), cat(b), cat(w)});
        const auto s = score_tlx(r);
        py::dict d, per, weights;
        for (std::size_t c = 0; c < kTlxCategoryCount; ++c) {
          const auto name = py::str(std::string(to_string(static_cast<TlxCategory>(c))));
          per[name] = s.per_category[c];
          weights[name] = s.weights[c];
        }
        d["per_category"] = per;
        d["weights"] = weights;
        d["overall"] = s.overall;
        return d;
      }, py::arg("ratings"), py::arg("pairwise_choices"),
      "ratings maps category to 0..20; pairwise_choices holds (first, second, winner) triples.");
  m.def("summarize_likert", [](const std::vector<std::vector<int>>& responses, int lo, int hi) {
        const auto s = summarize_likert(responses, {lo, hi});
        py::list out;
        for (const auto& q : s.questions) {
          py::dict d;
          d["respondents"] = q.respondents;
          d["mean"] = q.mean;
          d["median"] = q.median;
          d["modes"] = q.modes;
          d["sd"] = q.sd;
          d["histogram"] = q.histogram;
          out.append(d);
        }
        return out;
      }, py::arg("responses"), py::arg("min") = 1, py::arg("max") = 5);

  m.def("validate", [](const std::filesystem::path& path) {
        load_input(path);
        return true;
      }, py::arg("path"), "Loads and validates a manifest or data file; raises on problems.");
  m.def("report", [](const std::filesystem::path& path, std::uint64_t seed, double threshold,
                     std::optional<std::vector<double>> tau_grid, const std::string& zeta,
                     std::size_t baseline, std::size_t draws) {
        ReportConfig cfg;
        cfg.seed = seed;
        cfg.threshold = threshold;
        cfg.tau_grid = std::move(tau_grid);
        cfg.zeta = parse_zeta(zeta);
        cfg.baseline = baseline;
        cfg.draws = draws;
        const auto bundle = load_input(path);
        py::gil_scoped_release release;
        return serialize_report(run_report(bundle, cfg));
      }, py::arg("path"), py::arg("seed") = 0, py::arg("threshold") = kDefaultConsensusThreshold,
      py::arg("tau_grid") = py::none(), py::arg("zeta") = "avg", py::arg("baseline") = 1,
      py::arg("draws") = 10000, "Full study report as a JSON string.");
}
