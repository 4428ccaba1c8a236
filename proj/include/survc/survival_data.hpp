#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "survc/csv.hpp"
#include "survc/errors.hpp"
#include "survc/matrix.hpp"

namespace survc {

/// One right-censored follow-up: observed time and event indicator
/// (1 = event observed, 0 = censored).
struct SurvivalObservation {
  double time = 0.0;
  int event = 0;
};

/// Right-censored sample with a dense covariate matrix.
struct SurvivalDataset {
  std::vector<SurvivalObservation> observations;
  Matrix covariates;                       // n x p
  std::vector<std::string> feature_names;  // p labels, unique

  std::size_t size() const { return observations.size(); }
  std::size_t num_features() const { return covariates.cols(); }

  std::vector<double> times() const {
    std::vector<double> t(observations.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = observations[i].time;
    return t;
  }

  std::vector<int> events() const {
    std::vector<int> e(observations.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = observations[i].event;
    return e;
  }

  std::size_t event_count() const {
    std::size_t c = 0;
    for (const auto& o : observations) c += o.event == 1;
    return c;
  }

  void validate() const {
    if (covariates.rows() != observations.size())
      throw data_error("covariate row count does not match observation count");
    if (feature_names.size() != covariates.cols())
      throw data_error("feature name count does not match covariate columns");
    std::set<std::string> seen;
    for (const auto& name : feature_names)
      if (!seen.insert(name).second)
        throw data_error("duplicate feature name: " + name);
    for (std::size_t i = 0; i < observations.size(); ++i) {
      const auto& o = observations[i];
      if (!(o.time > 0.0) || !std::isfinite(o.time))
        throw data_error("nonpositive or non-finite time in row " +
                         std::to_string(i + 1));
      if (o.event != 0 && o.event != 1)
        throw data_error("event indicator outside {0,1} in row " +
                         std::to_string(i + 1));
    }
  }
};

/// Right-continuous step estimate of a survival function: value is 1 before
/// the first jump and values[i] on [jump_times[i], jump_times[i+1]).
struct KaplanMeierCurve {
  std::vector<double> jump_times;  // strictly increasing
  std::vector<double> values;      // non-increasing, in [0, 1]

  double evaluate(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return 1.0;
    return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
  }
};

inline double km_evaluate(const KaplanMeierCurve& curve, double t) {
  return curve.evaluate(t);
}

/// Kaplan-Meier estimate of the censoring survival function G(t) = P(C > t),
/// i.e. the product-limit curve treating censorings (event = 0) as events.
/// At tied times, survival events leave the risk set before censorings are
/// counted, so the factor at time t is 1 - d_cens / (at_risk - d_event).
inline KaplanMeierCurve censoring_km(const std::vector<double>& times,
                                     const std::vector<int>& events) {
  const std::size_t n = times.size();
  if (n == 0) throw data_error("empty dataset");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  KaplanMeierCurve curve;
  double surv = 1.0;
  std::size_t at_risk = n;
  std::size_t i = 0;
  while (i < n) {
    const double t = times[order[i]];
    std::size_t d_event = 0, d_cens = 0;
    while (i < n && times[order[i]] == t) {
      if (events[order[i]] == 1)
        ++d_event;
      else
        ++d_cens;
      ++i;
    }
    if (d_cens > 0) {
      surv *= 1.0 - static_cast<double>(d_cens) /
                        static_cast<double>(at_risk - d_event);
      curve.jump_times.push_back(t);
      curve.values.push_back(surv);
    }
    at_risk -= d_event + d_cens;
  }
  return curve;
}

inline KaplanMeierCurve censoring_km(const SurvivalDataset& data) {
  return censoring_km(data.times(), data.events());
}

/// Column mapping for CSV ingestion. Columns not named as time/event become
/// covariates unless an explicit covariate list is given.
struct CsvSchema {
  std::string time_column = "time";
  std::string event_column = "event";
  std::optional<std::vector<std::string>> covariate_columns;
};

inline SurvivalDataset load_dataset(const std::filesystem::path& path,
                                    const CsvSchema& schema = {}) {
  CsvTable table = read_csv(path);
  const std::size_t time_col = table.column_index(schema.time_column);
  const std::size_t event_col = table.column_index(schema.event_column);

  std::vector<std::size_t> cov_cols;
  if (schema.covariate_columns) {
    for (const auto& name : *schema.covariate_columns)
      cov_cols.push_back(table.column_index(name));
  } else {
    for (std::size_t j = 0; j < table.header.size(); ++j)
      if (j != time_col && j != event_col) cov_cols.push_back(j);
  }
  if (cov_cols.empty()) throw data_error("no covariate columns in " + path.string());

  SurvivalDataset data;
  data.covariates = Matrix(table.rows.size(), cov_cols.size());
  for (std::size_t j = 0; j < cov_cols.size(); ++j)
    data.feature_names.push_back(table.header[cov_cols[j]]);

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    SurvivalObservation obs;
    obs.time = parse_cell(row[time_col], i + 1, schema.time_column);
    if (!(obs.time > 0.0))
      throw data_error("nonpositive time " + row[time_col] + " in row " +
                       std::to_string(i + 1));
    const double ev = parse_cell(row[event_col], i + 1, schema.event_column);
    if (ev != 0.0 && ev != 1.0)
      throw data_error("event value '" + row[event_col] + "' outside {0,1} in row " +
                       std::to_string(i + 1));
    obs.event = static_cast<int>(ev);
    data.observations.push_back(obs);
    for (std::size_t j = 0; j < cov_cols.size(); ++j)
      data.covariates(i, j) = parse_cell(row[cov_cols[j]], i + 1, data.feature_names[j]);
  }
  data.validate();
  return data;
}

/// Dataset CSV writer (header: time,event,<features>).
inline std::string dataset_to_csv(const SurvivalDataset& data) {
  std::string out = "time,event";
  for (const auto& name : data.feature_names) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += format_double(data.observations[i].time);
    out += ",";
    out += std::to_string(data.observations[i].event);
    for (std::size_t j = 0; j < data.num_features(); ++j) {
      out += ",";
      out += format_double(data.covariates(i, j));
    }
    out += "\n";
  }
  return out;
}

}  // namespace survc
