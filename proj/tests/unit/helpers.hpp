// Shared fixtures for the unit suites: random datasets and models with
// controlled shapes, and feasible points for the relaxed objective.
#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "memip/rng.hpp"
#include "memip/types.hpp"

namespace testutil {

// Random dataset: up to max_realizations windows of varying length, events
// uniform in time with occasional exact ties (same time, later input order).
inline memip::Dataset random_dataset(memip::Rng& rng, int d,
                                     int max_realizations, int max_events) {
  memip::Dataset data;
  data.d = d;
  const int n_real = 1 + static_cast<int>(rng.uniform(0.0, max_realizations));
  for (int h = 0; h < n_real; ++h) {
    memip::Realization r;
    r.id = "r" + std::to_string(h);
    r.t_minus = h == 0 ? 0.0 : rng.uniform(0.0, 2.0);
    r.t_plus = r.t_minus + rng.uniform(2.0, 12.0);
    const int n = static_cast<int>(rng.uniform(0.0, max_events + 1));
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      // ~10% ties to exercise the strict-past rule.
      if (!times.empty() && rng.bernoulli(0.1)) {
        times.push_back(times.back());
      } else {
        times.push_back(rng.uniform(r.t_minus + 1e-6, r.t_plus - 1e-6));
      }
    }
    std::sort(times.begin(), times.end());
    for (double t : times) {
      r.events.push_back(
          {t, 1 + static_cast<int>(rng.uniform(0.0, d)) % d});
    }
    data.realizations.push_back(std::move(r));
  }
  data.validate();
  return data;
}

// Non-negative coefficients with a strictly positive background constant are
// feasible for every dataset (all features are non-negative and the
// background constant contributes through A[0][1] = 1).
inline memip::ExpSumModel random_feasible_model(memip::Rng& rng, int d, int K,
                                                double alpha) {
  memip::ExpSumModel model(d, K, alpha);
  for (int v = 1; v <= d; ++v) {
    for (int u = 0; u <= d; ++u) {
      for (int k = 1; k <= K; ++k) {
        model.at(v, u, k) =
            u == 0 && k == 1 ? rng.uniform(0.3, 1.5) : rng.uniform(0.0, 0.3);
      }
    }
  }
  return model;
}

}  // namespace testutil
