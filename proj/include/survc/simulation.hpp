#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survc/errors.hpp"
#include "survc/matrix.hpp"
#include "survc/rng.hpp"
#include "survc/survival_data.hpp"

namespace survc {

/// Synthetic-study generator settings: equicorrelated Gaussian markers drive
/// the location and log-scale of a log-logistic AFT model, with independent
/// exponential censoring calibrated to a target rate.
struct SimulationConfig {
  std::size_t n = 100;
  std::size_t p = 1000;
  double rho = 0.5;
  double mu_intercept = 1.5;
  std::array<double, 4> mu_slopes{1.5, 1.0, -1.0, -1.5};
  double phi_intercept = -1.0;
  std::array<double, 4> phi_slopes{2.0, -2.0, 1.0, -1.0};
  double target_censoring = 0.5;
  std::optional<double> censoring_scale;  // mean censoring time; calibrated if unset
  std::uint64_t seed = 0;

  void validate() const {
    if (!(rho >= 0.0 && rho < 1.0)) throw data_error("rho must lie in [0, 1)");
    if (!(target_censoring > 0.0 && target_censoring < 1.0))
      throw data_error("target censoring rate must lie in (0, 1)");
    if (p < 4) throw data_error("need at least 4 markers");
    if (n < 1) throw data_error("need n >= 1");
  }
};

/// Generated dataset together with its latent truth. eta_mu is the true AFT
/// location per row (larger means longer survival, so the matching risk
/// score for concordance estimators is its negation).
struct GeneratedData {
  SurvivalDataset data;
  std::vector<double> eta_mu;
  double realized_censoring = 0.0;
  double censoring_scale = 0.0;
};

/// Equicorrelated standard Gaussian markers by the shared-factor construction
/// x_l = sqrt(rho) z0 + sqrt(1-rho) z_l. Column l draws from its own stream,
/// so widening p leaves earlier columns (and the outcomes) untouched.
inline Matrix sample_markers(std::size_t n, std::size_t p, double rho,
                             std::uint64_t seed) {
  Matrix x(n, p);
  const double w_shared = std::sqrt(rho);
  const double w_own = std::sqrt(1.0 - rho);
  std::vector<double> z0(n);
  RngStream shared = derive_stream(seed, "markers/shared");
  for (std::size_t i = 0; i < n; ++i) z0[i] = shared.normal();
  for (std::size_t l = 0; l < p; ++l) {
    RngStream col = derive_stream(seed, "markers/col", l);
    for (std::size_t i = 0; i < n; ++i)
      x(i, l) = w_shared * z0[i] + w_own * col.normal();
  }
  return x;
}

inline double eta_mu_of(const SimulationConfig& config, const Matrix& markers,
                        std::size_t row) {
  double v = config.mu_intercept;
  for (std::size_t l = 0; l < 4; ++l) v += config.mu_slopes[l] * markers(row, l);
  return v;
}

inline double eta_phi_of(const SimulationConfig& config, const Matrix& markers,
                         std::size_t row) {
  double v = config.phi_intercept;
  for (std::size_t l = 0; l < 4; ++l) v += config.phi_slopes[l] * markers(row, l);
  return v;
}

/// Log-logistic AFT survival times: T = exp(eta_mu + exp(eta_phi) * W) with
/// W standard logistic. The log-time is clamped to +-700 so the exponential
/// neither overflows nor underflows to zero; outputs stay strictly positive
/// and finite, and ranks are unaffected in the clamped extreme tails.
inline std::vector<double> sample_survival(const SimulationConfig& config,
                                           const Matrix& markers,
                                           RngStream& noise) {
  if (markers.cols() < 4) throw data_error("need at least 4 marker columns");
  std::vector<double> t(markers.rows());
  for (std::size_t i = 0; i < markers.rows(); ++i) {
    const double w = noise.logistic();
    const double log_t =
        eta_mu_of(config, markers, i) + std::exp(eta_phi_of(config, markers, i)) * w;
    t[i] = std::exp(std::clamp(log_t, -700.0, 700.0));
  }
  return t;
}

/// Mean of the exponential censoring distribution that realizes the target
/// censoring rate, found by bisection on a pilot sample. The pilot draws are
/// a pure function of (config, pilot_seed), so the scale is reproducible and
/// shared across every dataset generated for the same setting.
inline double calibrate_censoring(const SimulationConfig& config,
                                  std::uint64_t pilot_seed = 0x70696c6f74ull,
                                  std::size_t pilot_n = 100000) {
  config.validate();
  SimulationConfig pilot_config = config;
  pilot_config.n = pilot_n;
  pilot_config.p = 4;

  Matrix x = sample_markers(pilot_n, 4, config.rho, derive_seed(pilot_seed, "pilot/markers"));
  RngStream noise = derive_stream(pilot_seed, "pilot/noise");
  std::vector<double> t = sample_survival(pilot_config, x, noise);
  RngStream cens = derive_stream(pilot_seed, "pilot/censoring");
  std::vector<double> e(pilot_n);
  for (auto& v : e) v = cens.exponential(1.0);

  auto rate = [&](double scale) {
    std::size_t censored = 0;
    for (std::size_t i = 0; i < pilot_n; ++i) censored += t[i] > scale * e[i];
    return static_cast<double>(censored) / static_cast<double>(pilot_n);
  };

  double lo = 1e-12, hi = 1e12;
  if (rate(lo) < config.target_censoring || rate(hi) > config.target_censoring)
    throw numeric_error("censoring calibration cannot bracket the target rate");
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (rate(mid) > config.target_censoring)
      lo = mid;  // too much censoring: raise the mean censoring time
    else
      hi = mid;
  }
  const double scale = std::sqrt(lo * hi);
  if (std::abs(rate(scale) - config.target_censoring) > 0.01)
    throw numeric_error("censoring calibration did not reach the target rate");
  return scale;
}

/// Full synthetic draw: markers, survival times, independent exponential
/// censoring, observed pairs (min, indicator); deterministic given the seed.
inline GeneratedData generate_dataset(const SimulationConfig& config) {
  config.validate();
  GeneratedData out;
  out.censoring_scale = config.censoring_scale ? *config.censoring_scale
                                               : calibrate_censoring(config);

  Matrix x = sample_markers(config.n, config.p, config.rho,
                            derive_seed(config.seed, "markers"));
  RngStream noise = derive_stream(config.seed, "noise");
  std::vector<double> t = sample_survival(config, x, noise);
  RngStream cens = derive_stream(config.seed, "censoring");

  out.data.covariates = std::move(x);
  out.data.feature_names.resize(config.p);
  for (std::size_t l = 0; l < config.p; ++l)
    out.data.feature_names[l] = "x" + std::to_string(l + 1);

  out.eta_mu.resize(config.n);
  out.data.observations.resize(config.n);
  std::size_t censored = 0;
  for (std::size_t i = 0; i < config.n; ++i) {
    out.eta_mu[i] = eta_mu_of(config, out.data.covariates, i);
    const double c = cens.exponential(out.censoring_scale);
    const bool event = t[i] <= c;
    out.data.observations[i] = {event ? t[i] : c, event ? 1 : 0};
    censored += !event;
  }
  out.realized_censoring =
      static_cast<double>(censored) / static_cast<double>(config.n);
  return out;
}

}  // namespace survc
