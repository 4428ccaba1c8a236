#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "survc/concordance.hpp"
#include "survc/csv.hpp"
#include "survc/errors.hpp"
#include "survc/matrix.hpp"
#include "survc/survival_data.hpp"

namespace survc {

struct BoostConfig {
  std::size_t m_stop = 10000;
  double step_length = 0.1;
  SmoothingParam smoothing;

  void validate() const {
    if (m_stop < 1) throw data_error("m_stop must be >= 1");
    if (!(step_length > 0.0 && step_length < 1.0))
      throw data_error("step length must lie in (0, 1)");
    smoothing.validate();
  }
};

/// Fitted linear marker combination. Prediction is the centered combination
/// sum_l coefficients[l] * (x_l - feature_means[l]); additive shifts of the
/// marker never change a concordance estimate, so no intercept is kept.
struct LinearMarkerModel {
  std::vector<double> coefficients;
  std::vector<double> feature_means;
  std::vector<std::string> feature_names;

  std::vector<double> predict(const Matrix& covariates) const {
    if (covariates.cols() != coefficients.size())
      throw data_error("predict: covariate columns do not match model features");
    std::vector<double> eta(covariates.rows(), 0.0);
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
      const double beta = coefficients[j];
      if (beta == 0.0) continue;
      const double mean = feature_means[j];
      for (std::size_t i = 0; i < covariates.rows(); ++i)
        eta[i] += beta * (covariates(i, j) - mean);
    }
    return eta;
  }
};

/// Per-iteration diagnostics: risk_path[m] is the smoothed risk after m
/// updates (index 0 is the zero offset), selected[m-1] the component updated
/// at iteration m.
struct BoostTrace {
  std::vector<double> risk_path;
  std::vector<std::size_t> selected;
  std::vector<double> final_eta;  // internally tracked marker after the last update
};

struct BaseLearnerFit {
  double slope = 0.0;
  double rss = 0.0;
};

/// No-intercept least-squares fit of u on a centered covariate:
/// slope = <u,x>/<x,x>, rss = <u,u> - slope * <u,x>.
inline BaseLearnerFit base_learner_fit(const std::vector<double>& u,
                                       const std::vector<double>& x_centered) {
  if (u.size() != x_centered.size())
    throw data_error("base_learner_fit: length mismatch");
  double ux = 0.0, xx = 0.0, uu = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    ux += u[i] * x_centered[i];
    xx += x_centered[i] * x_centered[i];
    uu += u[i] * u[i];
  }
  if (xx <= 0.0) throw numeric_error("base_learner_fit: constant covariate");
  const double slope = ux / xx;
  return {slope, uu - slope * ux};
}

struct FitResult {
  LinearMarkerModel model;
  BoostTrace trace;
};

/// Component-wise gradient boosting of the smoothed concordance index.
///
/// Starts from the zero marker, and per iteration: evaluates the negative
/// risk gradient at the current marker, fits it with every single-covariate
/// base-learner, updates the best-fitting component (lowest index on ties)
/// by step_length times its slope, and records risk and selection. The IPCW
/// weight matrix depends only on the outcomes, so it is built once up front.
inline FitResult fit(const SurvivalDataset& data, const BoostConfig& config) {
  config.validate();
  data.validate();
  const std::size_t n = data.size();
  const std::size_t p = data.num_features();
  if (n < 2) throw data_error("need at least 2 observations");
  if (p < 1) throw data_error("need at least 1 covariate");

  const KaplanMeierCurve g_curve = censoring_km(data);
  const PairWeights weights = pair_weights(data, g_curve);

  // Centered columns; zero-variance covariates never enter the selection.
  std::vector<std::vector<double>> xc(p);
  std::vector<double> means(p), xx(p, 0.0);
  std::vector<bool> eligible(p, false);
  bool any_eligible = false;
  for (std::size_t j = 0; j < p; ++j) {
    auto col = data.covariates.column(j);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    means[j] = mean;
    xc[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) xc[j][i] = col[i] - mean;
    if (*mn < *mx) {
      eligible[j] = true;
      any_eligible = true;
      for (double v : xc[j]) xx[j] += v * v;
    }
  }
  if (!any_eligible) throw numeric_error("all covariates are constant");

  LinearMarkerModel model;
  model.coefficients.assign(p, 0.0);
  model.feature_means = means;
  model.feature_names = data.feature_names;

  BoostTrace trace;
  trace.risk_path.reserve(config.m_stop + 1);
  trace.selected.reserve(config.m_stop);

  std::vector<double> eta(n, 0.0);
  std::vector<double> grad(n, 0.0);
  for (std::size_t m = 0; m < config.m_stop; ++m) {
    trace.risk_path.push_back(
        smoothed_c_risk_gradient(weights, eta, config.smoothing, grad));

    std::size_t best = p;
    double best_gain = -std::numeric_limits<double>::infinity();
    double best_slope = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (!eligible[j]) continue;
      double ux = 0.0;
      const double* x = xc[j].data();
      for (std::size_t i = 0; i < n; ++i) ux += grad[i] * x[i];
      const double gain = ux * ux / xx[j];  // = <u,u> - rss_j
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
        best_slope = ux / xx[j];
      }
    }

    const double step = config.step_length * best_slope;
    model.coefficients[best] += step;
    const double* x = xc[best].data();
    for (std::size_t i = 0; i < n; ++i) eta[i] += step * x[i];
    trace.selected.push_back(best);
  }
  trace.risk_path.push_back(smoothed_c_risk(weights, eta, config.smoothing));
  trace.final_eta = std::move(eta);
  return {std::move(model), std::move(trace)};
}

inline std::vector<double> predict(const LinearMarkerModel& model,
                                   const Matrix& covariates) {
  return model.predict(covariates);
}

/// Flat key-value model file; doubles are written in round-tripping decimal
/// form so save/load/save is byte-identical.
inline std::string model_to_text(const LinearMarkerModel& model,
                                 const BoostConfig& config) {
  std::string out = "survc-model v1\n";
  out += "sigma " + format_double(config.smoothing.sigma) + "\n";
  out += "step_length " + format_double(config.step_length) + "\n";
  out += "m_stop " + std::to_string(config.m_stop) + "\n";
  out += "features " + std::to_string(model.coefficients.size()) + "\n";
  for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
    out += "feature\t" + model.feature_names[j] + "\t" +
           format_double(model.feature_means[j]) + "\t" +
           format_double(model.coefficients[j]) + "\n";
  }
  return out;
}

inline std::pair<LinearMarkerModel, BoostConfig> model_from_text(
    const std::string& text) {
  LinearMarkerModel model;
  BoostConfig config;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "survc-model v1")
    throw data_error("not a survc model file");
  auto parse_num = [](const std::string& s, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw data_error(std::string("bad model field: ") + what);
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("feature\t", 0) == 0) {
      std::string rest = line.substr(8);
      const auto t1 = rest.find('\t');
      const auto t2 = rest.find('\t', t1 + 1);
      if (t1 == std::string::npos || t2 == std::string::npos)
        throw data_error("malformed feature line in model file");
      model.feature_names.push_back(rest.substr(0, t1));
      model.feature_means.push_back(
          parse_num(rest.substr(t1 + 1, t2 - t1 - 1), "mean"));
      model.coefficients.push_back(parse_num(rest.substr(t2 + 1), "coefficient"));
    } else {
      const auto sp = line.find(' ');
      if (sp == std::string::npos) throw data_error("malformed model line: " + line);
      const std::string key = line.substr(0, sp);
      const std::string value = line.substr(sp + 1);
      if (key == "sigma")
        config.smoothing.sigma = parse_num(value, "sigma");
      else if (key == "step_length")
        config.step_length = parse_num(value, "step_length");
      else if (key == "m_stop")
        config.m_stop = static_cast<std::size_t>(parse_num(value, "m_stop"));
      else if (key != "features")
        throw data_error("unknown model field: " + key);
    }
  }
  return {std::move(model), config};
}

inline void save_model(const std::filesystem::path& path,
                       const LinearMarkerModel& model, const BoostConfig& config) {
  atomic_write(path, model_to_text(model, config));
}

inline std::pair<LinearMarkerModel, BoostConfig> load_model(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open model file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_text(text);
}

}  // namespace survc
