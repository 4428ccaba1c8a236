#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "survc/concordance.hpp"
#include "survc/errors.hpp"
#include "survc/survival_data.hpp"

namespace survc {

/// Ranking of candidate markers by univariate discriminatory power.
/// Entries are sorted by score (non-increasing), index breaking ties;
/// markers whose score could not be computed carry defined = false and
/// sort after every defined one.
struct MarkerRanking {
  struct Entry {
    std::size_t feature = 0;
    double score = 0.0;
    bool defined = true;
  };

  std::vector<Entry> entries;
  bool folded = true;  // score definition: max(c, 1-c) when true, raw c otherwise
};

/// Score every feature by its own IPCW concordance. With fold = true the
/// score is max(c, 1-c), so markers associated with longer survival rank as
/// high as equally strong short-survival markers.
inline MarkerRanking rank_markers(const SurvivalDataset& data,
                                  const KaplanMeierCurve& g_curve,
                                  bool fold = true) {
  const std::size_t n = data.size();
  const std::size_t p = data.num_features();
  const auto times = data.times();
  const auto events = data.events();

  // The usable pairs and their weights depend only on the outcomes; collect
  // them once and sweep each marker column over the list.
  struct Pair {
    std::size_t i, k;
    double a;
  };
  std::vector<Pair> pairs;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    const double g = g_curve.evaluate(times[i]);
    if (g <= 0.0) continue;
    const double a = 1.0 / (g * g);
    for (std::size_t k = 0; k < n; ++k) {
      if (times[i] < times[k]) {
        pairs.push_back({i, k, a});
        den += a;
      }
    }
  }
  if (den == 0.0) throw numeric_error("concordance undefined: no usable pairs");

  MarkerRanking ranking;
  ranking.folded = fold;
  ranking.entries.resize(p);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = data.covariates(i, j);
    double num = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n && finite; ++i) finite = std::isfinite(col[i]);
    if (finite) {
      for (const auto& pr : pairs)
        if (col[pr.i] > col[pr.k]) num += pr.a;
      const double c = num / den;
      ranking.entries[j] = {j, fold ? std::max(c, 1.0 - c) : c, true};
    } else {
      ranking.entries[j] = {j, std::numeric_limits<double>::quiet_NaN(), false};
    }
  }

  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const MarkerRanking::Entry& a, const MarkerRanking::Entry& b) {
                     if (a.defined != b.defined) return a.defined;
                     if (!a.defined) return a.feature < b.feature;
                     if (a.score != b.score) return a.score > b.score;
                     return a.feature < b.feature;
                   });
  return ranking;
}

/// First p_star feature indices of the ranking.
inline std::vector<std::size_t> select_top(const MarkerRanking& ranking,
                                           std::size_t p_star) {
  if (p_star > ranking.entries.size())
    throw data_error("p_star exceeds the number of ranked features");
  std::vector<std::size_t> out;
  out.reserve(p_star);
  for (std::size_t r = 0; r < p_star; ++r) out.push_back(ranking.entries[r].feature);
  return out;
}

}  // namespace survc
