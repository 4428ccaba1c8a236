// Acceptance suite: one pass/fail line per criterion.
//
// Usage: acceptance --criterion N   (N in 1..11)
//        acceptance --all
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "survc/survc.hpp"

using namespace survc;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << criterion << ": " << what
            << "  [" << detail << "]" << std::endl;
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

struct Fixture {
  std::vector<double> t;
  std::vector<int> d;
  std::vector<double> eta;
};

Fixture random_fixture(RngStream& rng, std::size_t n, bool censored) {
  Fixture f;
  for (std::size_t i = 0; i < n; ++i) {
    f.t.push_back(0.1 + rng.uniform01() * 10.0);
    f.d.push_back(censored ? static_cast<int>(rng.below(2)) : 1);
    f.eta.push_back(rng.normal());
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (f.t[i] < f.t[arg]) arg = i;
  f.d[arg] = 1;
  return f;
}

StudyConfig base_study(std::size_t replicates, std::size_t m_stop) {
  StudyConfig study;
  study.replicates = replicates;
  study.m_stop = m_stop;
  study.master_seed = 1;
  study.workers = 0;
  return study;
}

// --------------------------------------------------------------------------

void criterion_1() {
  const auto start = Clock::now();
  RngStream rng = derive_stream(101, "acceptance-1");
  double max_gap = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    Fixture f = random_fixture(rng, 2 + rng.below(49), false);
    const KaplanMeierCurve g = censoring_km(f.t, f.d);
    max_gap = std::max(max_gap, std::abs(uno_c(f.t, f.d, f.eta, g) -
                                         harrell_c(f.t, f.d, f.eta)));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  report(1, max_gap < 1e-12 && secs < 1.0,
         "uno_c equals harrell_c on 200 uncensored datasets",
         "max gap " + fmt(max_gap * 1e13) + "e-13, " + fmt(secs) + " s");
}

void criterion_2() {
  const auto start = Clock::now();
  RngStream rng = derive_stream(102, "acceptance-2");
  const double h = 1e-6;
  double worst_rel = 0.0, worst_sum = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Fixture f = random_fixture(rng, 30, true);
    const PairWeights w = pair_weights(f.t, f.d, censoring_km(f.t, f.d));
    const auto grad = smoothed_c_gradient(w, f.eta, {0.1});
    double sum = 0.0, max_fd = 0.0, max_err = 0.0;
    for (std::size_t m = 0; m < f.eta.size(); ++m) {
      sum += grad[m];
      std::vector<double> up = f.eta, dn = f.eta;
      up[m] += h;
      dn[m] -= h;
      const double fd =
          (smoothed_c_risk(w, up, {0.1}) - smoothed_c_risk(w, dn, {0.1})) / (2.0 * h);
      max_fd = std::max(max_fd, std::abs(fd));
      max_err = std::max(max_err, std::abs(grad[m] + fd));
    }
    worst_rel = std::max(worst_rel, max_err / std::max(max_fd, 1e-300));
    worst_sum = std::max(worst_sum, std::abs(sum));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  report(2, worst_rel < 1e-6 && worst_sum < 1e-10 && secs < 5.0,
         "gradient matches finite differences on 100 censored fixtures",
         "max rel err " + fmt(worst_rel * 1e7) + "e-7, max sum " +
             fmt(worst_sum * 1e11) + "e-11, " + fmt(secs) + " s");
}

void criterion_3() {
  RngStream rng = derive_stream(103, "acceptance-3");
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng.below(30);
    Fixture f = random_fixture(rng, n, true);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    for (std::size_t i = 0; i < n; ++i)
      f.eta[i] = 0.01 * static_cast<double>(perm[i] + 1);
    const KaplanMeierCurve g = censoring_km(f.t, f.d);
    const PairWeights w = pair_weights(f.t, f.d, g);
    worst = std::max(worst, std::abs(-smoothed_c_risk(w, f.eta, {1e-4}) -
                                     uno_c(f.t, f.d, f.eta, g)));
  }
  report(3, worst < 1e-3, "negative smoothed risk at sigma=1e-4 approaches uno_c",
         "max gap " + fmt(worst * 1e4) + "e-4");
}

void criterion_4() {
  RngStream rng = derive_stream(104, "acceptance-4");
  bool estimators_ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    Fixture f = random_fixture(rng, 3 + rng.below(30), true);
    const KaplanMeierCurve g = censoring_km(f.t, f.d);
    const double h0 = harrell_c(f.t, f.d, f.eta);
    const double u0 = uno_c(f.t, f.d, f.eta, g);
    auto apply = [&](auto fun) {
      std::vector<double> tr(f.eta.size());
      for (std::size_t i = 0; i < f.eta.size(); ++i) tr[i] = fun(f.eta[i]);
      return tr;
    };
    for (const auto& tr :
         {apply([](double x) { return 2.5 * x + 7.0; }),
          apply([](double x) { return x * x * x; }),
          apply([](double x) { return std::exp(x); })}) {
      estimators_ok &= harrell_c(f.t, f.d, tr) == h0;
      estimators_ok &= uno_c(f.t, f.d, tr, g) == u0;
    }
  }

  bool boosting_ok = true;
  double worst_eta_gap = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const std::size_t n = 40, p = 4;
    Matrix x(n, p);
    std::vector<double> t(n);
    std::vector<int> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.normal();
      t[i] = std::exp(0.8 * x(i, 0) - 0.5 * x(i, 1) + rng.logistic());
      d[i] = static_cast<int>(rng.below(2));
    }
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (t[i] < t[arg]) arg = i;
    d[arg] = 1;
    SurvivalDataset data;
    for (std::size_t i = 0; i < n; ++i) data.observations.push_back({t[i], d[i]});
    data.covariates = x;
    for (std::size_t j = 0; j < p; ++j)
      data.feature_names.push_back("x" + std::to_string(j + 1));

    BoostConfig config;
    config.m_stop = 300;
    FitResult base = fit(data, config);
    SurvivalDataset scaled = data;
    const double scales[p] = {2.0, 0.25, 16.0, 1.0};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) scaled.covariates(i, j) *= scales[j];
    FitResult re = fit(scaled, config);
    boosting_ok &= base.trace.selected == re.trace.selected;
    for (std::size_t i = 0; i < n; ++i)
      worst_eta_gap = std::max(
          worst_eta_gap, std::abs(base.trace.final_eta[i] - re.trace.final_eta[i]));
  }
  boosting_ok &= worst_eta_gap < 1e-8;
  report(4, estimators_ok && boosting_ok,
         "monotone-transform and rescaling invariance",
         std::string("estimators ") + (estimators_ok ? "exact" : "BROKEN") +
             ", eta gap " + fmt(worst_eta_gap * 1e9) + "e-9");
}

void criterion_5() {
  StudyConfig study = base_study(100, 10000);
  study.cells = {{100, 5, 0.5, 0.1}};
  const StudyResult result = run_simulation_study(study);
  const double boosted = median(result.cells[0].uno_test_values());
  const double truec = median(result.cells[0].uno_true_values());
  const bool pass =
      boosted >= 0.734 && boosted <= 0.794 && truec >= 0.759 && truec <= 0.799;
  report(5, pass, "anchor cell n=100 p*=5 cens=50% sigma=0.1 (B=100, m=10000)",
         "boosted median " + fmt(boosted) + " in [0.734,0.794], true median " +
             fmt(truec) + " in [0.759,0.799]");
}

void criterion_6() {
  StudyConfig study = base_study(100, 10000);
  study.cells = {{100, 5, 0.3, 0.1}, {100, 5, 0.7, 0.1}};
  const StudyResult result = run_simulation_study(study);
  const double b30 = median(result.cells[0].uno_test_values());
  const double t30 = median(result.cells[0].uno_true_values());
  const double b70 = median(result.cells[1].uno_test_values());
  const double t70 = median(result.cells[1].uno_true_values());
  const bool pass = std::abs(t30 - 0.830) <= 0.03 && std::abs(t70 - 0.690) <= 0.03 &&
                    std::abs(b30 - 0.820) <= 0.04 && std::abs(b70 - 0.668) <= 0.04;
  report(6, pass, "censoring-rate cells 30%/70% (B=100, m=10000)",
         "true " + fmt(t30) + "/" + fmt(t70) + " vs 0.830/0.690 (+-0.03), boosted " +
             fmt(b30) + "/" + fmt(b70) + " vs 0.820/0.668 (+-0.04)");
}

void criterion_7() {
  StudyConfig study = base_study(50, 10000);
  study.cells = {{50, 5, 0.5, 0.1}, {200, 5, 0.5, 0.1}, {500, 5, 0.5, 0.1}};
  const StudyResult result = run_simulation_study(study);
  const double m50 = median(result.cells[0].uno_test_values());
  const double m200 = median(result.cells[1].uno_test_values());
  const double m500 = median(result.cells[2].uno_test_values());
  report(7, m50 < m200 && m200 < m500,
         "boosted median increases across n=50,200,500 (B=50)",
         fmt(m50) + " < " + fmt(m200) + " < " + fmt(m500));
}

void criterion_8() {
  StudyConfig study = base_study(50, 10000);
  study.cells = {{100, 5, 0.5, 0.5}, {100, 5, 0.5, 0.1}};
  const StudyResult result = run_simulation_study(study);
  const double m_sigma_large = median(result.cells[0].uno_test_values());
  const double m_sigma_small = median(result.cells[1].uno_test_values());
  const bool pass = m_sigma_large < m_sigma_small &&
                    std::abs(m_sigma_large - 0.738) <= 0.03 &&
                    std::abs(m_sigma_small - 0.764) <= 0.03;
  report(8, pass, "sigma ordering 0.5 vs 0.1 at the anchor cell (B=50)",
         "sigma=0.5 median " + fmt(m_sigma_large) + " (target 0.738+-0.03), sigma=0.1 "
         "median " + fmt(m_sigma_small) + " (target 0.764+-0.03)");
}

void criterion_9() {
  SimulationConfig probe;
  probe.p = 4;
  probe.target_censoring = 0.5;
  const double scale = calibrate_censoring(probe);

  int hits = 0;
  const int B = 100;
  for (int b = 0; b < B; ++b) {
    SimulationConfig sim;
    sim.n = 1000;
    sim.p = 1000;
    sim.censoring_scale = scale;
    sim.seed = derive_seed(1, "acceptance-9", static_cast<std::uint64_t>(b));
    GeneratedData gen = generate_dataset(sim);
    const MarkerRanking ranking = rank_markers(gen.data, censoring_km(gen.data), true);
    const auto top = select_top(ranking, 5);
    bool all_in = true;
    for (std::size_t marker = 0; marker < 4; ++marker)
      all_in &= std::find(top.begin(), top.end(), marker) != top.end();
    hits += all_in;
  }
  report(9, hits >= 95,
         "four informative markers in folded top-5 (n=1000, p=1000, 100 runs)",
         std::to_string(hits) + "/100 >= 95");
}

void criterion_10() {
  StudyConfig study = base_study(100, 10000);
  study.cells = {{100, 5, 0.5, 0.1}};
  const StudyResult result = run_simulation_study(study);
  const CellResult& cell = result.cells[0];
  const double m1 = cell.median_marker_coefficient(0);
  const double m2 = cell.median_marker_coefficient(1);
  const double m3 = cell.median_marker_coefficient(2);
  const double m4 = cell.median_marker_coefficient(3);

  std::vector<double> false_coefs;
  for (const auto& rep : cell.replicates)
    for (std::size_t j = 0; j < rep.selected.size(); ++j)
      if (rep.selected[j] > 3) false_coefs.push_back(rep.marker_coefficients[j]);
  const double false_median = false_coefs.empty() ? 0.0 : median(false_coefs);

  const bool pattern = m1 > m2 && m2 > 0.0 && 0.0 > m3 && m3 > m4;
  const bool false_small = std::abs(false_median) <= 0.1 * std::abs(m1);
  report(10, pattern && false_small,
         "coefficient sign pattern over B=100 fits (survival-time orientation)",
         "medians " + fmt(m1) + " > " + fmt(m2) + " > 0 > " + fmt(m3) + " > " +
             fmt(m4) + ", false-marker median " + fmt(false_median));
}

void criterion_11() {
  StudyConfig study = base_study(50, 50000);
  study.cells = {{100, 30, 0.5, 0.1}};
  const StudyResult result = run_simulation_study(study);
  int overoptimistic = 0;
  for (const auto& rep : result.cells[0].replicates)
    overoptimistic += rep.uno_train - rep.uno_test >= 0.05;
  report(11, overoptimistic >= 45,
         "training exceeds test concordance by >=0.05 (n=100, p*=30, m=50000)",
         std::to_string(overoptimistic) + "/50 >= 45");
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  bool all = false;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--all") == 0) all = true;
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc)
      which = std::atoi(argv[a + 1]);
  }
  if (!all && (which < 1 || which > 11)) {
    std::cerr << "usage: acceptance --criterion N | --all\n";
    return 64;
  }
  void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                          criterion_5, criterion_6, criterion_7, criterion_8,
                          criterion_9, criterion_10, criterion_11};
  if (all)
    for (auto* c : criteria) c();
  else
    criteria[which - 1]();
  return failures;
}
