#include "memip/features.hpp"

#include <algorithm>
#include <cmath>

#include "memip/quadrature.hpp"

namespace memip {

namespace {

constexpr double kFlushBelow = 1e-300;  // underflow guard for decayed states

void check_basis(int K, double alpha) {
  if (K < 1) throw config_error("features: basis order must be >= 1");
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw config_error("features: alpha must be positive");
  }
}

// Row bookkeeping shared by the fast and brute-force builders: rows are
// grouped by target type and ordered by (realization, event index) inside
// each group.
struct RowPlan {
  std::vector<std::size_t> target_offset;       // size d + 2
  std::vector<std::size_t> next_row;            // per target; consumed in order
};

RowPlan plan_rows(const Dataset& data, FeatureSet& fs) {
  const int d = data.d;
  RowPlan plan;
  plan.target_offset.assign(static_cast<std::size_t>(d) + 2, 0);
  for (const auto& r : data.realizations) {
    for (const auto& e : r.events) {
      ++plan.target_offset[static_cast<std::size_t>(e.type) + 1];
    }
  }
  for (std::size_t v = 1; v < plan.target_offset.size(); ++v) {
    plan.target_offset[v] += plan.target_offset[v - 1];
  }
  plan.next_row.assign(plan.target_offset.begin(),
                       plan.target_offset.end() - 1);
  fs.target_offset = plan.target_offset;
  return plan;
}

void init_feature_set(const Dataset& data, int K, double alpha, FeatureSet& fs) {
  data.validate();
  check_basis(K, alpha);
  fs.d = data.d;
  fs.K = K;
  fs.alpha = alpha;
  fs.total_window = data.total_window();
  fs.realization_ids.clear();
  fs.realization_ids.reserve(data.realizations.size());
  for (const auto& r : data.realizations) fs.realization_ids.push_back(r.id);
  const std::size_t n = data.total_events();
  fs.a.assign(n * static_cast<std::size_t>((data.d + 1) * K), 0.0);
  fs.event_refs.assign(n, {});
  fs.bhat.assign(static_cast<std::size_t>((data.d + 1) * K), 0.0);
}

// Closed-form Bhat accumulation for one realization.
void accumulate_bhat(const Realization& r, int d, int K, double alpha,
                     std::vector<double>& bhat) {
  const ParamLayout layout{d, K};
  // Background: integral of exp(-(k-1)*alpha*s) over the window, measured
  // from the global origin.
  bhat[static_cast<std::size_t>(layout.idx(0, 1))] += r.window();
  for (int k = 2; k <= K; ++k) {
    const double rate = (k - 1) * alpha;
    bhat[static_cast<std::size_t>(layout.idx(0, k))] +=
        (std::exp(-rate * r.t_minus) - std::exp(-rate * r.t_plus)) / rate;
  }
  // Kernels: each event contributes its remaining-window integral.
  for (const auto& e : r.events) {
    const double tail = r.t_plus - e.time;
    for (int k = 1; k <= K; ++k) {
      const double rate = k * alpha;
      bhat[static_cast<std::size_t>(layout.idx(e.type, k))] +=
          (1.0 - std::exp(-rate * tail)) / rate;
    }
  }
}

}  // namespace

FeatureSet build_event_features(const Dataset& data, int K, double alpha) {
  FeatureSet fs;
  init_feature_set(data, K, alpha, fs);
  RowPlan plan = plan_rows(data, fs);

  const int d = data.d;
  const int bd = fs.block_dim();
  const ParamLayout layout{d, K};
  std::vector<double> state(static_cast<std::size_t>(bd), 0.0);  // u>=1 slots
  std::vector<double> decay(static_cast<std::size_t>(K), 0.0);

  for (std::size_t h = 0; h < data.realizations.size(); ++h) {
    const Realization& r = data.realizations[h];
    std::fill(state.begin(), state.end(), 0.0);
    double prev_time = r.t_minus;
    std::size_t i = 0;
    const std::size_t n = r.events.size();
    while (i < n) {
      const double t = r.events[i].time;
      // Decay every kernel state to the current time.
      const double step = t - prev_time;
      if (step > 0.0) {
        for (int k = 1; k <= K; ++k) {
          decay[static_cast<std::size_t>(k - 1)] = std::exp(-k * alpha * step);
        }
        for (int u = 1; u <= d; ++u) {
          double* s = state.data();
          for (int k = 1; k <= K; ++k) {
            double& c = s[layout.idx(u, k)];
            c *= decay[static_cast<std::size_t>(k - 1)];
            if (c < kFlushBelow) c = 0.0;
          }
        }
      }
      // Events sharing this timestamp form one group: all of them read the
      // pre-jump state (strict past excludes simultaneous events), then all
      // jumps are applied.
      std::size_t group_end = i;
      while (group_end < n && r.events[group_end].time == t) ++group_end;
      for (std::size_t j = i; j < group_end; ++j) {
        const Event& e = r.events[j];
        const std::size_t row = plan.next_row[static_cast<std::size_t>(e.type)]++;
        double* out = fs.a.data() + row * static_cast<std::size_t>(bd);
        std::copy(state.begin(), state.end(), out);
        for (int k = 1; k <= K; ++k) {
          out[layout.idx(0, k)] = std::exp(-(k - 1) * alpha * t);
        }
        fs.event_refs[row] = FeatureSet::EventRef{h, j, t};
      }
      for (std::size_t j = i; j < group_end; ++j) {
        for (int k = 1; k <= K; ++k) {
          state[static_cast<std::size_t>(layout.idx(r.events[j].type, k))] += 1.0;
        }
      }
      prev_time = t;
      i = group_end;
    }
    accumulate_bhat(r, d, K, alpha, fs.bhat);
  }
  return fs;
}

FeatureSet bruteforce_event_features(const Dataset& data, int K, double alpha) {
  FeatureSet fs;
  init_feature_set(data, K, alpha, fs);
  RowPlan plan = plan_rows(data, fs);

  const int d = data.d;
  const int bd = fs.block_dim();
  const ParamLayout layout{d, K};

  for (std::size_t h = 0; h < data.realizations.size(); ++h) {
    const Realization& r = data.realizations[h];
    for (std::size_t i = 0; i < r.events.size(); ++i) {
      const Event& e = r.events[i];
      const std::size_t row = plan.next_row[static_cast<std::size_t>(e.type)]++;
      double* out = fs.a.data() + row * static_cast<std::size_t>(bd);
      for (int k = 1; k <= K; ++k) {
        out[layout.idx(0, k)] = std::exp(-(k - 1) * alpha * e.time);
      }
      for (std::size_t j = 0; j < r.events.size(); ++j) {
        if (!(r.events[j].time < e.time)) continue;  // strict past only
        const double lag = e.time - r.events[j].time;
        for (int k = 1; k <= K; ++k) {
          out[layout.idx(r.events[j].type, k)] += std::exp(-k * alpha * lag);
        }
      }
      fs.event_refs[row] = FeatureSet::EventRef{h, i, e.time};
    }
  }

  // Bhat by adaptive quadrature of the defining integrals.
  for (std::size_t h = 0; h < data.realizations.size(); ++h) {
    const Realization& r = data.realizations[h];
    for (int k = 1; k <= K; ++k) {
      const double bg_rate = (k - 1) * alpha;
      fs.bhat[static_cast<std::size_t>(layout.idx(0, k))] += adaptive_simpson(
          [&](double s) { return std::exp(-bg_rate * s); }, r.t_minus, r.t_plus,
          1e-12);
      const double rate = k * alpha;
      for (int u = 1; u <= d; ++u) {
        // Integrate the summed exponentials piecewise between events so the
        // quadrature never straddles a kink.
        auto value = [&](double s) {
          double acc = 0.0;
          for (const auto& e : r.events) {
            if (e.type == u && e.time < s) acc += std::exp(-rate * (s - e.time));
          }
          return acc;
        };
        std::vector<double> cuts{r.t_minus};
        for (const auto& e : r.events) {
          if (e.type == u) cuts.push_back(e.time);
        }
        cuts.push_back(r.t_plus);
        double acc = 0.0;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
          if (cuts[c + 1] > cuts[c]) {
            acc += adaptive_simpson(value, cuts[c], cuts[c + 1], 1e-13);
          }
        }
        fs.bhat[static_cast<std::size_t>(layout.idx(u, k))] += acc;
      }
    }
  }
  return fs;
}

GridFeatures build_grid_features(const Dataset& data, int K, double alpha,
                                 double dt) {
  data.validate();
  check_basis(K, alpha);
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw config_error("features: grid step dt must be positive");
  }

  GridFeatures gf;
  gf.d = data.d;
  gf.K = K;
  gf.alpha = alpha;
  gf.dt = dt;
  gf.grids.resize(data.realizations.size());

  const int d = data.d;
  const int bd = gf.block_dim();
  const ParamLayout layout{d, K};

  for (std::size_t h = 0; h < data.realizations.size(); ++h) {
    const Realization& r = data.realizations[h];
    auto& grid = gf.grids[h];

    // Uniform grid with step <= dt, merged with the event times.
    const auto steps = static_cast<std::size_t>(std::ceil(r.window() / dt));
    grid.times.reserve(steps + r.events.size() + 2);
    for (std::size_t m = 0; m <= steps; ++m) {
      const double frac = static_cast<double>(m) / static_cast<double>(steps);
      grid.times.push_back(r.t_minus + frac * r.window());
    }
    grid.times.back() = r.t_plus;
    for (const auto& e : r.events) grid.times.push_back(e.time);
    std::sort(grid.times.begin(), grid.times.end());
    grid.times.erase(std::unique(grid.times.begin(), grid.times.end()),
                     grid.times.end());

    grid.b.assign(grid.times.size() * static_cast<std::size_t>(bd), 0.0);
    std::vector<double> state(static_cast<std::size_t>(bd), 0.0);
    double prev_time = r.t_minus;
    std::size_t next_event = 0;
    for (std::size_t m = 0; m < grid.times.size(); ++m) {
      const double s = grid.times[m];
      // Apply jumps for events strictly before this grid time, decaying in
      // segments so each jump enters at its own timestamp.
      while (next_event < r.events.size() && r.events[next_event].time < s) {
        const Event& e = r.events[next_event];
        const double step = e.time - prev_time;
        if (step > 0.0) {
          for (int u = 1; u <= d; ++u) {
            for (int k = 1; k <= K; ++k) {
              double& c = state[static_cast<std::size_t>(layout.idx(u, k))];
              c *= std::exp(-k * alpha * step);
              if (c < kFlushBelow) c = 0.0;
            }
          }
        }
        for (int k = 1; k <= K; ++k) {
          state[static_cast<std::size_t>(layout.idx(e.type, k))] += 1.0;
        }
        prev_time = e.time;
        ++next_event;
      }
      const double step = s - prev_time;
      if (step > 0.0) {
        for (int u = 1; u <= d; ++u) {
          for (int k = 1; k <= K; ++k) {
            double& c = state[static_cast<std::size_t>(layout.idx(u, k))];
            c *= std::exp(-k * alpha * step);
            if (c < kFlushBelow) c = 0.0;
          }
        }
        prev_time = s;
      }
      double* out = grid.b.data() + m * static_cast<std::size_t>(bd);
      std::copy(state.begin(), state.end(), out);
      for (int k = 1; k <= K; ++k) {
        out[layout.idx(0, k)] = std::exp(-(k - 1) * alpha * s);
      }
    }
  }
  return gf;
}

}  // namespace memip
