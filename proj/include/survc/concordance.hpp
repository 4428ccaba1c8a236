#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "survc/errors.hpp"
#include "survc/matrix.hpp"
#include "survc/survival_data.hpp"

namespace survc {

/// Smoothing bandwidth of the sigmoid that replaces the hard indicator in the
/// concordance risk. Small values approximate the indicator tightly.
struct SmoothingParam {
  double sigma = 0.1;

  void validate() const {
    if (!(sigma > 0.0)) throw data_error("sigma must be positive");
  }
};

/// Normalized IPCW pairwise weights. Entry (i, k) is nonzero only when
/// observation i is an event with time strictly below observation k's time;
/// nonzero entries sum to 1. Stored sparse in row-major order; `dense()`
/// materializes the full n x n matrix for small problems.
struct PairWeights {
  struct Entry {
    std::size_t i;
    std::size_t k;
    double w;
  };

  std::size_t n = 0;
  std::vector<Entry> entries;

  double total() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.w;
    return s;
  }

  Matrix dense() const {
    Matrix m(n, n, 0.0);
    for (const auto& e : entries) m(e.i, e.k) = e.w;
    return m;
  }
};

namespace detail {

// 1 / (1 + exp(-x/sigma)) without overflow for any finite x.
inline double sigmoid(double x, double sigma) {
  if (x >= 0.0) {
    const double a = std::exp(-x / sigma);
    return 1.0 / (1.0 + a);
  }
  const double a = std::exp(x / sigma);
  return a / (1.0 + a);
}

// Derivative of the sigmoid above; even in x and saturates to 0 in the tails.
inline double sigmoid_derivative(double x, double sigma) {
  const double a = std::exp(-std::abs(x) / sigma);
  const double d = 1.0 + a;
  return a / (sigma * d * d);
}

}  // namespace detail

/// Harrell's concordance estimate: among ordered pairs whose smaller observed
/// time is an event, the fraction with strictly concordant predictor values.
/// Ties in eta earn no credit.
inline double harrell_c(const std::vector<double>& times,
                        const std::vector<int>& events,
                        const std::vector<double>& eta) {
  const std::size_t n = times.size();
  if (events.size() != n || eta.size() != n)
    throw data_error("harrell_c: input length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (times[i] < times[k]) {
        den += 1.0;
        if (eta[i] > eta[k]) num += 1.0;
      }
    }
  }
  if (den == 0.0) throw numeric_error("concordance undefined: no usable pairs");
  return num / den;
}

inline double harrell_c(const SurvivalDataset& data, const std::vector<double>& eta) {
  return harrell_c(data.times(), data.events(), eta);
}

/// IPCW pair weights of the smoothed concordance risk: w_ik proportional to
/// event_i * G(t_i)^-2 * I(t_i < t_k), normalized to sum 1. Pairs whose
/// censoring survival estimate is 0 are dropped (weight 0) to stay finite.
inline PairWeights pair_weights(const std::vector<double>& times,
                                const std::vector<int>& events,
                                const KaplanMeierCurve& g_curve) {
  const std::size_t n = times.size();
  if (events.size() != n) throw data_error("pair_weights: input length mismatch");
  PairWeights pw;
  pw.n = n;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    const double g = g_curve.evaluate(times[i]);
    if (g <= 0.0) continue;
    const double a = 1.0 / (g * g);
    for (std::size_t k = 0; k < n; ++k) {
      if (times[i] < times[k]) {
        pw.entries.push_back({i, k, a});
        total += a;
      }
    }
  }
  if (total <= 0.0) throw numeric_error("no usable pairs for IPCW weights");
  for (auto& e : pw.entries) e.w /= total;
  return pw;
}

inline PairWeights pair_weights(const SurvivalDataset& data,
                                const KaplanMeierCurve& g_curve) {
  return pair_weights(data.times(), data.events(), g_curve);
}

/// Uno's IPCW concordance estimate. Reduces to Harrell's estimate when no
/// observation is censored (G identically 1).
inline double uno_c(const std::vector<double>& times, const std::vector<int>& events,
                    const std::vector<double>& eta, const KaplanMeierCurve& g_curve) {
  const std::size_t n = times.size();
  if (events.size() != n || eta.size() != n)
    throw data_error("uno_c: input length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    const double g = g_curve.evaluate(times[i]);
    if (g <= 0.0) continue;
    const double a = 1.0 / (g * g);
    for (std::size_t k = 0; k < n; ++k) {
      if (times[i] < times[k]) {
        den += a;
        if (eta[i] > eta[k]) num += a;
      }
    }
  }
  if (den == 0.0) throw numeric_error("concordance undefined: no usable pairs");
  return num / den;
}

inline double uno_c(const SurvivalDataset& data, const std::vector<double>& eta,
                    const KaplanMeierCurve& g_curve) {
  return uno_c(data.times(), data.events(), eta, g_curve);
}

/// Smoothed empirical concordance risk: minus the weighted sum of sigmoid
/// terms over usable pairs. Lies in [-1, 0]; sigmoid evaluation saturates to
/// its limits instead of overflowing.
inline double smoothed_c_risk(const PairWeights& weights,
                              const std::vector<double>& eta,
                              const SmoothingParam& smoothing) {
  smoothing.validate();
  double risk = 0.0;
  for (const auto& e : weights.entries)
    risk -= e.w * detail::sigmoid(eta[e.i] - eta[e.k], smoothing.sigma);
  return risk;
}

/// Negative gradient of the smoothed risk (the ascent direction on the
/// smoothed concordance). Each observation collects both of its pair roles:
/// component m receives +w_mk * K'(eta_m - eta_k) for pairs it leads and
/// -w_jm * K'(eta_j - eta_m) for pairs it trails. Components sum to zero.
inline std::vector<double> smoothed_c_gradient(const PairWeights& weights,
                                               const std::vector<double>& eta,
                                               const SmoothingParam& smoothing) {
  smoothing.validate();
  std::vector<double> grad(eta.size(), 0.0);
  for (const auto& e : weights.entries) {
    const double kp = detail::sigmoid_derivative(eta[e.i] - eta[e.k], smoothing.sigma);
    grad[e.i] += e.w * kp;
    grad[e.k] -= e.w * kp;
  }
  return grad;
}

/// Fused risk + gradient pass sharing one exponential per pair; used by the
/// boosting loop where both quantities are needed at the same eta.
inline double smoothed_c_risk_gradient(const PairWeights& weights,
                                       const std::vector<double>& eta,
                                       const SmoothingParam& smoothing,
                                       std::vector<double>& grad) {
  smoothing.validate();
  grad.assign(eta.size(), 0.0);
  const double sigma = smoothing.sigma;
  double risk = 0.0;
  for (const auto& e : weights.entries) {
    const double x = eta[e.i] - eta[e.k];
    const double a = std::exp(-std::abs(x) / sigma);
    const double d = 1.0 + a;
    risk -= e.w * (x >= 0.0 ? 1.0 / d : a / d);
    const double kp = a / (sigma * d * d);
    grad[e.i] += e.w * kp;
    grad[e.k] -= e.w * kp;
  }
  return risk;
}

}  // namespace survc
