#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "survc/boosting.hpp"
#include "survc/concordance.hpp"
#include "survc/csv.hpp"
#include "survc/errors.hpp"
#include "survc/rng.hpp"
#include "survc/selection.hpp"
#include "survc/simulation.hpp"
#include "survc/survival_data.hpp"

namespace survc {

// ---------------------------------------------------------------------------
// Quantiles (linear interpolation, inclusive): h = (n-1)q on the sorted
// sample, interpolating between the bracketing order statistics.
// ---------------------------------------------------------------------------

inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw data_error("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

inline double median(const std::vector<double>& values) {
  return quantile(values, 0.5);
}

inline double interquartile_range(const std::vector<double>& values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

// ---------------------------------------------------------------------------
// Stratified learning/test split
// ---------------------------------------------------------------------------

/// Disjoint, exhaustive learning/test split stratified by the event
/// indicator, so the learning event proportion stays within one observation
/// of the full-sample proportion.
struct SplitPlan {
  std::vector<std::size_t> learning;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

inline SplitPlan stratified_split(const std::vector<int>& events, double fraction,
                                  std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw data_error("split fraction must lie in (0, 1)");
  std::vector<std::size_t> strata[2];
  for (std::size_t i = 0; i < events.size(); ++i)
    strata[events[i] == 1 ? 1 : 0].push_back(i);

  SplitPlan plan;
  plan.seed = seed;
  RngStream stream = derive_stream(seed, "split");
  for (int s = 0; s < 2; ++s) {
    auto& idx = strata[s];
    if (idx.empty()) continue;
    if (idx.size() < 2) throw data_error("stratum with fewer than 2 observations");
    for (std::size_t i = idx.size() - 1; i > 0; --i)
      std::swap(idx[i], idx[stream.below(i + 1)]);
    std::size_t take = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(idx.size())));
    take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < take ? plan.learning : plan.test).push_back(idx[i]);
  }
  std::sort(plan.learning.begin(), plan.learning.end());
  std::sort(plan.test.begin(), plan.test.end());
  return plan;
}

// ---------------------------------------------------------------------------
// External evaluation: learning-sample censoring curve, test-sample outcomes
// ---------------------------------------------------------------------------

struct EvalResult {
  double uno = 0.0;
  double harrell = 0.0;
};

/// Evaluate a marker vector on test outcomes with the censoring curve fitted
/// on the learning outcomes only. The marker must be risk-oriented (larger
/// value predicts shorter survival), the orientation the estimators expect.
inline EvalResult evaluate_external(const std::vector<double>& eta_test,
                                    const std::vector<double>& learn_times,
                                    const std::vector<int>& learn_events,
                                    const std::vector<double>& test_times,
                                    const std::vector<int>& test_events) {
  const KaplanMeierCurve g = censoring_km(learn_times, learn_events);
  return {uno_c(test_times, test_events, eta_test, g),
          harrell_c(test_times, test_events, eta_test)};
}

inline EvalResult evaluate_external(const LinearMarkerModel& model,
                                    const SurvivalDataset& learn,
                                    const SurvivalDataset& test) {
  return evaluate_external(model.predict(test.covariates), learn.times(),
                           learn.events(), test.times(), test.events());
}

// ---------------------------------------------------------------------------
// Simulation study: grid of (n, p*, censoring, sigma) cells, B replicates
// ---------------------------------------------------------------------------

struct StudyCell {
  std::size_t n = 100;
  std::size_t p_star = 5;
  double censoring = 0.5;
  double sigma = 0.1;
};

struct StudyConfig {
  std::vector<StudyCell> cells;
  std::size_t replicates = 100;
  std::size_t m_stop = 10000;
  double step_length = 0.1;
  std::size_t p = 1000;
  double rho = 0.5;
  std::size_t n_select = 1000;
  std::size_t n_test = 1000;
  std::uint64_t master_seed = 1;
  std::size_t workers = 0;  // 0 = hardware concurrency
};

/// One replicate of the select -> boost -> evaluate pipeline.
struct ReplicateResult {
  double uno_test = 0.0;      // boosted marker on test outcomes
  double uno_train = 0.0;     // boosted marker on its own training sample
  double harrell_test = 0.0;
  double uno_true = 0.0;      // true location score (negated eta_mu) on test
  std::vector<std::size_t> selected;  // original marker indices, rank order
  // Fitted coefficient per selected marker, reported in survival-time
  // orientation (positive = longer survival), comparable to the generating
  // location coefficients; the fitted risk score is its negation.
  std::vector<double> marker_coefficients;
};

struct CellResult {
  StudyCell cell;
  std::vector<ReplicateResult> replicates;

  std::vector<double> uno_test_values() const {
    std::vector<double> v(replicates.size());
    for (std::size_t b = 0; b < replicates.size(); ++b) v[b] = replicates[b].uno_test;
    return v;
  }

  std::vector<double> uno_true_values() const {
    std::vector<double> v(replicates.size());
    for (std::size_t b = 0; b < replicates.size(); ++b) v[b] = replicates[b].uno_true;
    return v;
  }

  /// Median over replicates of the survival-time-oriented coefficient of one
  /// original marker; replicates that did not select it contribute 0.
  double median_marker_coefficient(std::size_t marker) const {
    std::vector<double> v;
    for (const auto& r : replicates) {
      double c = 0.0;
      for (std::size_t j = 0; j < r.selected.size(); ++j)
        if (r.selected[j] == marker) c = r.marker_coefficients[j];
      v.push_back(c);
    }
    return median(v);
  }
};

struct StudyResult {
  std::vector<CellResult> cells;
};

inline SimulationConfig study_sim_config(const StudyConfig& study,
                                         const StudyCell& cell) {
  SimulationConfig sim;
  sim.p = study.p;
  sim.rho = study.rho;
  sim.target_censoring = cell.censoring;
  return sim;
}

/// Run one replicate: fresh selection, training and test samples, folded
/// top-p* pre-selection, boosting on the selected columns, and evaluation of
/// both the boosted and the true marker with the learning-sample censoring
/// curve. Everything derives from the replicate seed.
inline ReplicateResult run_replicate(const StudyConfig& study, const StudyCell& cell,
                                     double censoring_scale, std::uint64_t seed) {
  SimulationConfig sim = study_sim_config(study, cell);
  sim.censoring_scale = censoring_scale;

  sim.n = study.n_select;
  sim.seed = derive_seed(seed, "selection-data");
  GeneratedData sel_data = generate_dataset(sim);

  sim.n = cell.n;
  sim.seed = derive_seed(seed, "train-data");
  GeneratedData train = generate_dataset(sim);

  sim.n = study.n_test;
  sim.seed = derive_seed(seed, "test-data");
  GeneratedData test = generate_dataset(sim);

  const KaplanMeierCurve g_sel = censoring_km(sel_data.data);
  const MarkerRanking ranking = rank_markers(sel_data.data, g_sel, true);
  std::vector<std::size_t> picked = select_top(ranking, cell.p_star);

  SurvivalDataset train_sub;
  train_sub.observations = train.data.observations;
  train_sub.covariates = train.data.covariates.select_columns(picked);
  for (std::size_t j : picked)
    train_sub.feature_names.push_back(train.data.feature_names[j]);

  BoostConfig boost;
  boost.m_stop = study.m_stop;
  boost.step_length = study.step_length;
  boost.smoothing.sigma = cell.sigma;
  FitResult fitted = fit(train_sub, boost);

  const KaplanMeierCurve g_learn = censoring_km(train.data);
  const auto test_times = test.data.times();
  const auto test_events = test.data.events();

  ReplicateResult rep;
  rep.selected = picked;
  rep.marker_coefficients.reserve(picked.size());
  for (std::size_t j = 0; j < picked.size(); ++j)
    rep.marker_coefficients.push_back(-fitted.model.coefficients[j]);

  const std::vector<double> eta_test =
      fitted.model.predict(test.data.covariates.select_columns(picked));
  rep.uno_test = uno_c(test_times, test_events, eta_test, g_learn);
  rep.harrell_test = harrell_c(test_times, test_events, eta_test);
  rep.uno_train = uno_c(train.data.times(), train.data.events(),
                        fitted.trace.final_eta, g_learn);

  // The latent location is survival-time oriented; estimators expect risk
  // orientation, so the true score enters negated.
  std::vector<double> true_score(test.eta_mu.size());
  for (std::size_t i = 0; i < true_score.size(); ++i) true_score[i] = -test.eta_mu[i];
  rep.uno_true = uno_c(test_times, test_events, true_score, g_learn);
  return rep;
}

/// Run the full grid. Replicates are deterministic functions of
/// (master_seed, cell index, replicate index), so results do not depend on
/// worker count or execution order.
inline StudyResult run_simulation_study(const StudyConfig& study) {
  StudyResult result;
  result.cells.resize(study.cells.size());

  std::map<double, double> scale_by_rate;
  for (const auto& cell : study.cells)
    if (!scale_by_rate.count(cell.censoring)) {
      SimulationConfig sim;
      sim.p = 4;
      sim.rho = study.rho;
      sim.target_censoring = cell.censoring;
      scale_by_rate[cell.censoring] = calibrate_censoring(sim);
    }

  struct Job {
    std::size_t cell_index;
    std::size_t replicate;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < study.cells.size(); ++c) {
    result.cells[c].cell = study.cells[c];
    result.cells[c].replicates.resize(study.replicates);
    for (std::size_t b = 0; b < study.replicates; ++b) jobs.push_back({c, b});
  }

  const std::size_t workers =
      study.workers > 0 ? study.workers
                        : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job& job = jobs[j];
      const StudyCell& cell = study.cells[job.cell_index];
      const std::uint64_t seed =
          derive_seed(derive_seed(study.master_seed, "cell", job.cell_index),
                      "replicate", job.replicate);
      result.cells[job.cell_index].replicates[job.replicate] =
          run_replicate(study, cell, scale_by_rate.at(cell.censoring), seed);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Study output formats
// ---------------------------------------------------------------------------

inline std::string replicates_to_csv(const StudyResult& result) {
  std::string out =
      "n,p_star,censoring,sigma,replicate,uno_test,uno_train,harrell_test,uno_true,"
      "selected,coefficients\n";
  for (const auto& cell : result.cells) {
    for (std::size_t b = 0; b < cell.replicates.size(); ++b) {
      const auto& r = cell.replicates[b];
      out += std::to_string(cell.cell.n) + "," + std::to_string(cell.cell.p_star) +
             "," + format_double(cell.cell.censoring) + "," +
             format_double(cell.cell.sigma) + "," + std::to_string(b) + "," +
             format_double(r.uno_test) + "," + format_double(r.uno_train) + "," +
             format_double(r.harrell_test) + "," + format_double(r.uno_true) + ",";
      for (std::size_t j = 0; j < r.selected.size(); ++j)
        out += (j ? ";" : "") + std::to_string(r.selected[j] + 1);
      out += ",";
      for (std::size_t j = 0; j < r.marker_coefficients.size(); ++j)
        out += (j ? ";" : "") + format_double(r.marker_coefficients[j]);
      out += "\n";
    }
  }
  return out;
}

inline std::string summary_to_csv(const StudyResult& result) {
  std::string out =
      "n,p_star,censoring,sigma,median_uno,iqr_uno,median_true,iqr_true\n";
  for (const auto& cell : result.cells) {
    const auto uno = cell.uno_test_values();
    const auto tru = cell.uno_true_values();
    out += std::to_string(cell.cell.n) + "," + std::to_string(cell.cell.p_star) +
           "," + format_double(cell.cell.censoring) + "," +
           format_double(cell.cell.sigma) + "," + format_double(median(uno)) + "," +
           format_double(interquartile_range(uno)) + "," +
           format_double(median(tru)) + "," + format_double(interquartile_range(tru)) +
           "\n";
  }
  return out;
}

inline std::string summary_to_text(const StudyResult& result) {
  char buf[160];
  std::string out =
      "   n  p*  cens  sigma   boosted C (IQR)      true C (IQR)\n";
  for (const auto& cell : result.cells) {
    const auto uno = cell.uno_test_values();
    const auto tru = cell.uno_true_values();
    std::snprintf(buf, sizeof(buf), "%4zu %3zu  %4.2f  %5.3f   %.3f (%.2f)%9s%.3f (%.2f)\n",
                  cell.cell.n, cell.cell.p_star, cell.cell.censoring, cell.cell.sigma,
                  median(uno), interquartile_range(uno), "", median(tru),
                  interquartile_range(tru));
    out += buf;
  }
  return out;
}

}  // namespace survc
