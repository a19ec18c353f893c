#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "elicit/agreement.hpp"
#include "elicit/consensus.hpp"
#include "elicit/logistic.hpp"
#include "elicit/monte_carlo.hpp"
#include "elicit/survey.hpp"
#include "elicit/trajectory.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace elicit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  Outcome& out;
  void operator()(bool ok, const std::string& what) {
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

struct ProcessResult {
  int exit_code = -1;
  std::string output;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

ProcessResult run(const std::string& command) {
  ProcessResult r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome worked_example(const std::string& cli, const fs::path& fixtures) {
  Outcome out;
  Check check{out};
  const auto t0 = std::chrono::steady_clock::now();
  const auto manifest = (fixtures / "worked_example" / "manifest.json").string();
  const auto text = run(quote(cli) + " agreement " + quote(manifest));
  const auto json = run(quote(cli) + " agreement --json " + quote(manifest));
  const double elapsed = seconds_since(t0);
  check(text.exit_code == 0 && json.exit_code == 0, "agreement exited non-zero");
  check(text.output.find("0.595") != std::string::npos, "text output lacks A(r)=0.595");
  check(text.output.find("0.574") != std::string::npos, "text output lacks AR(r)=0.574");
  if (!out.pass) return out;
  const auto j = nlohmann::json::parse(json.output);
  const auto& r = j["agreement"]["data"]["referents"][0];
  check(r["display"]["agreement_index"] == "0.595", "display A(r) differs");
  check(r["display"]["agreement_rate"] == "0.574", "display AR(r) differs");
  check(r["class_sizes"] == nlohmann::json::array({15, 3, 2}), "class sizes differ");
  const std::vector<std::size_t> sizes{15, 3, 2};
  check(agreement_index_exact(sizes).equivalent({119, 200}), "A(r) is not 119/200");
  check(agreement_rate_exact(sizes).equivalent({218, 380}), "AR(r) is not 218/380");
  check(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s exceeds 1 s");
  if (out.pass) out.detail = "A=0.595 AR=0.574 in " + fmt("%.3f", elapsed) + " s";
  return out;
}

Outcome speech_example(const std::string& cli, const fs::path& fixtures) {
  Outcome out;
  Check check{out};
  const auto file = (fixtures / "worked_example" / "speech.csv").string();
  const auto res = run(quote(cli) + " speech --json " + quote(file));
  check(res.exit_code == 0, "speech exited non-zero");
  if (!out.pass) return out;
  const auto j = nlohmann::json::parse(res.output);
  const auto& r = j["speech"]["data"]["referents"][0];
  check(r["max_consensus"].get<double>() == 60.0, "MC != 60");
  check(r["consensus_distinct_ratio"].get<double>() == 75.0, "CDR != 75");
  const SpeechTable t = [] {
    SpeechTable s{"move_left", {}};
    int p = 0;
    for (auto [u, n] : std::vector<std::pair<std::string, int>>{
             {"move left", 12}, {"left", 5}, {"move", 2}, {"sideways", 1}})
      for (int i = 0; i < n; ++i) s.entries.push_back({"P" + std::to_string(++p), u});
    return s;
  }();
  check(max_consensus(t) == 60.0 && consensus_distinct_ratio(t) == 75.0, "library MC/CDR differ");
  if (out.pass) out.detail = "MC=60% CDR=75%";
  return out;
}

Outcome identity_suite() {
  Outcome out;
  Check check{out};
  std::mt19937_64 rng(20210501);
  std::uniform_int_distribution<std::size_t> n_dist(2, 50);
  double worst = 0.0;
  const int tables = 2000;
  for (int i = 0; i < tables && out.pass; ++i) {
    const std::size_t n = n_dist(rng);
    std::uniform_int_distribution<int> q_dist(1, static_cast<int>(n));
    const auto labels = oracle::random_labels(rng, n, q_dist(rng));
    const auto sizes = oracle::class_sizes(labels);
    const double a = agreement_index(sizes);
    const double ar = agreement_rate(sizes);
    const double nd = static_cast<double>(n);
    const double gap = std::abs(a - (ar * (nd - 1.0) + 1.0) / nd);
    worst = std::max(worst, gap);
    check(gap <= 1e-12, "identity off by " + fmt("%.3g", gap));
    check(ar <= a, "AR exceeds A");
    // Equality only in the single-class case.
    check((sizes.size() == 1) == (ar == a), "AR == A outside the single-class case");
  }
  if (out.pass) out.detail = std::to_string(tables) + " tables, max error " + fmt("%.2g", worst);
  return out;
}

Outcome pairwise_oracle() {
  Outcome out;
  Check check{out};
  std::uint64_t total = 0;
  for (std::size_t n = 2; n <= 8 && out.pass; ++n) {
    std::uint64_t count = 0;
    oracle::for_each_partition(n, [&](const std::vector<int>& labels) {
      ++count;
      const auto exact = agreement_rate_exact(oracle::class_sizes(labels));
      const double brute = oracle::pairwise_agreement_rate(labels);
      std::size_t agree = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) agree += labels[i] == labels[j];
      check(exact.equivalent({agree, n * (n - 1) / 2}), "exact AR differs from pair count");
      check(exact.value() == brute, "AR differs from pair count");
    });
    check(count == oracle::bell_number(n), "partition enumeration incomplete");
    total += count;
  }
  if (out.pass) out.detail = std::to_string(total) + " partitions, N=2..8";
  return out;
}

Outcome dissimilarity_properties() {
  Outcome out;
  Check check{out};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> people(3, 7);
  for (int set = 0; set < 100 && out.pass; ++set) {
    const int n = people(rng);
    std::vector<Trajectory> singles;
    std::vector<std::vector<Trajectory>> groups;
    std::vector<Trajectory> multi;
    for (int p = 0; p < n; ++p) {
      const auto id = "P" + std::to_string(p);
      singles.push_back(preprocess(oracle::random_trajectory(rng, 3, 8, 20, id)));
      std::vector<Trajectory> g;
      for (int t = 0; t < 1 + static_cast<int>(rng() % 3); ++t) {
        g.push_back(preprocess(oracle::random_trajectory(rng, 3, 8, 20, id, t)));
        multi.push_back(g.back());
      }
      groups.push_back(std::move(g));
    }
    const auto m = dissimilarity_matrix(singles);
    const auto mm = dissimilarity_matrix(multi);
    const auto grid = default_tau_grid(m, 50);
    double prev = -1.0;
    for (double tau : grid) {
      const double c = consensus_at(m, tau);
      check(c >= prev, "classic consensus decreased");
      prev = c;
      for (Zeta z : {Zeta::min, Zeta::max, Zeta::avg})
        check(production_consensus_at(m, tau, z) == c, "single-trial production differs from classic");
    }
    for (double tau : default_tau_grid(mm, 50)) {
      const double lo = production_consensus_at(mm, tau, Zeta::min);
      const double mid = production_consensus_at(mm, tau, Zeta::avg);
      const double hi = production_consensus_at(mm, tau, Zeta::max);
      check(lo >= mid && mid >= hi, "zeta ordering violated");
    }
    if (set % 10 == 0) {
      const double tau = mm.max_value() / 2.0;
      check(production_consensus_at(groups, tau, Zeta::avg) ==
                production_consensus_at(mm, tau, Zeta::avg),
            "group and matrix production variants differ");
    }
  }
  if (out.pass) out.detail = "100 randomized sets";
  return out;
}

Outcome dtw_sanity() {
  Outcome out;
  Check check{out};
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto a = oracle::random_trajectory(rng, 4, 5, 30);
    const auto b = oracle::random_trajectory(rng, 4, 5, 30);
    check(dtw_distance(a, a) == 0.0, "self distance non-zero");
    check(dtw_distance(a, b) == dtw_distance(b, a), "asymmetric");
    check(std::abs(dtw_distance(a, b) - oracle::reference_dtw(a, b)) < 1e-9, "differs from full-table DTW");
  }
  Trajectory a{"P1", "r", 0, {Frame{{{0, 0, 0}}}, Frame{{{1, 0, 0}}}}, 25};
  Trajectory b = a;
  const Point3 d{0.5, -0.25, 2.0};
  for (auto& f : b.frames)
    for (int c = 0; c < 3; ++c) f.joints[0][c] += d[c];
  const double expected = 2.0 * std::sqrt(0.25 + 0.0625 + 4.0);
  const double got = dtw_distance(a, b);
  check(std::abs(got - expected) <= 1e-12, "2-frame offset gave " + fmt("%.15g", got));
  if (out.pass) out.detail = "offset example " + fmt("%.12f", got);
  return out;
}

Outcome logistic_round_trip() {
  Outcome out;
  Check check{out};
  const auto t0 = std::chrono::steady_clock::now();
  const LogisticParams truth{0.0, 100.0, 1.0, 2.0};
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(-2.0 + 6.0 * i / 49.0);
    y.push_back(truth(x.back()));
  }
  const auto fit = fit_logistic(x, y);
  const double elapsed = seconds_since(t0);
  check(fit.converged, "fit did not converge");
  const auto rel = [](double got, double want) {
    return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
  };
  const double worst = std::max({rel(fit.params.lower, truth.lower), rel(fit.params.upper, truth.upper),
                                 rel(fit.params.midpoint, truth.midpoint),
                                 rel(fit.params.steepness, truth.steepness)});
  check(worst <= 1e-3, "parameter error " + fmt("%.3g", worst));
  check(elapsed < 5.0, "runtime " + fmt("%.3f", elapsed) + " s exceeds 5 s");
  if (out.pass) out.detail = "max relative error " + fmt("%.2g", worst) + " in " + fmt("%.3f", elapsed) + " s";
  return out;
}

Outcome null_calibration() {
  Outcome out;
  Check check{out};
  const auto t0 = std::chrono::steady_clock::now();
  const auto q4 = simulate_null({20, 4, UniformCategories{}, 20210501}, 10000);
  const auto q10 = simulate_null({20, 10, UniformCategories{}, 20210501}, 10000);
  const double p = p_value(0.30, q10);
  const double elapsed = seconds_since(t0);
  check(std::abs(q4.mean - 0.25) <= 0.01, "mean AR " + fmt("%.4f", q4.mean));
  check(p < 0.05, "p-value " + fmt("%.4f", p));
  check(elapsed < 10.0, "runtime " + fmt("%.3f", elapsed) + " s exceeds 10 s");
  if (out.pass)
    out.detail = "mean " + fmt("%.4f", q4.mean) + ", p(0.30|q=10) " + fmt("%.4f", p) + " in " +
                 fmt("%.3f", elapsed) + " s";
  return out;
}

Outcome tlx_bounds() {
  Outcome out;
  Check check{out};
  std::mt19937_64 rng(3);
  const auto response = [&](std::array<int, 6> ratings,
                             const std::function<TlxCategory(TlxCategory, TlxCategory)>& pick) {
    TlxResponse r;
    r.ratings = ratings;
    for (const auto& [a, b] : tlx_pairs()) r.pairwise_choices.push_back({a, b, pick(a, b)});
    return r;
  };
  const auto coin = [&](TlxCategory a, TlxCategory b) { return rng() & 1 ? a : b; };
  std::uniform_int_distribution<int> rating(0, 20);
  for (int i = 0; i < 1000; ++i) {
    std::array<int, 6> ratings{};
    for (auto& v : ratings) v = rating(rng);
    const auto s = score_tlx(response(ratings, coin));
    const auto [lo, hi] = std::minmax_element(s.per_category.begin(), s.per_category.end());
    check(s.overall >= *lo - 1e-12 && s.overall <= *hi + 1e-12, "overall outside raw range");
  }
  check(score_tlx(response({0, 0, 0, 0, 0, 0}, coin)).overall == 0.0, "all-zero is not 0");
  for (int i = 0; i < 20; ++i)
    check(score_tlx(response({20, 20, 20, 20, 20, 20}, coin)).overall == 100.0, "all-20 is not 100");
  const auto mental = score_tlx(response({20, 0, 0, 0, 0, 0}, [&](TlxCategory a, TlxCategory b) {
    return a == TlxCategory::mental || b == TlxCategory::mental ? TlxCategory::mental : coin(a, b);
  }));
  check(std::abs(mental.overall - 100.0 / 3.0) < 1e-12, "mental-only is not 33.33");
  if (out.pass) out.detail = "1000 random responses, 3 worked examples";
  return out;
}

Outcome determinism(const std::string& cli, const fs::path& fixtures) {
  Outcome out;
  Check check{out};
  const auto manifest = (fixtures / "full_study" / "manifest.json").string();
  const auto cmd = quote(cli) + " report --seed 1234 " + quote(manifest);
  const auto a = run(cmd);
  const auto b = run(cmd);
  check(a.exit_code == 0 && b.exit_code == 0, "report exited non-zero");
  check(!a.output.empty(), "empty report");
  check(a.output == b.output, "reports differ");
  if (out.pass) out.detail = std::to_string(a.output.size()) + " bytes identical";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <elicit-cli> <fixtures-dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path fixtures = argv[2];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"worked-example reproduction", [&] { return worked_example(cli, fixtures); }},
      {"speech-example reproduction", [&] { return speech_example(cli, fixtures); }},
      {"algebraic identity suite", identity_suite},
      {"pairwise oracle", pairwise_oracle},
      {"dissimilarity-consensus properties", dissimilarity_properties},
      {"dtw sanity", dtw_sanity},
      {"logistic round-trip", logistic_round_trip},
      {"null-model calibration", null_calibration},
      {"tlx bounds", tlx_bounds},
      {"determinism", [&] { return determinism(cli, fixtures); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
