#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "memip/features.hpp"
#include "memip/rng.hpp"
#include "memip/types.hpp"

using namespace memip;

namespace {

Dataset worked_example() {
  // d = 1, window [0, 10], two type-1 events at t = 1 and t = 2.
  Dataset data;
  data.d = 1;
  Realization r;
  r.id = "r0";
  r.t_minus = 0.0;
  r.t_plus = 10.0;
  r.events = {{1.0, 1}, {2.0, 1}};
  data.realizations.push_back(r);
  return data;
}

bool close(double x, double y, double rtol = 1e-10, double atol = 1e-12) {
  return std::abs(x - y) <= atol + rtol * std::max(std::abs(x), std::abs(y));
}

}  // namespace

TEST_CASE("two-event example matches hand-computed features") {
  const FeatureSet fs = build_event_features(worked_example(), 1, 1.0);
  const ParamLayout layout{1, 1};

  CHECK(fs.d == 1);
  CHECK(fs.K == 1);
  CHECK(fs.total_window == 10.0);
  REQUIRE(fs.rows() == 2);
  CHECK(fs.rows_for_target(1) == 2);

  // First event has an empty strict past; the background feature for k = 1
  // is identically 1.
  const double* a0 = fs.row(fs.target_offset[1]);
  CHECK(a0[layout.idx(0, 1)] == 1.0);
  CHECK(a0[layout.idx(1, 1)] == 0.0);

  // Second event sees the first at lag 1.
  const double* a1 = fs.row(fs.target_offset[1] + 1);
  CHECK(a1[layout.idx(0, 1)] == 1.0);
  CHECK(a1[layout.idx(1, 1)] ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));

  // Bhat: background entry is the window length; the kernel entry integrates
  // exp(-(t - t_j)) from each event to t+ = 10.
  CHECK(fs.bhat[static_cast<std::size_t>(layout.idx(0, 1))] == 10.0);
  CHECK(fs.bhat[static_cast<std::size_t>(layout.idx(1, 1))] ==
        doctest::Approx(1.9995411275680108).epsilon(1e-14));

  REQUIRE(fs.event_refs.size() == 2);
  CHECK(fs.event_refs[0].realization == 0);
  CHECK(fs.event_refs[0].index == 0);
  CHECK(fs.event_refs[0].time == 1.0);
  CHECK(fs.event_refs[1].index == 1);
}

TEST_CASE("simultaneous events do not see each other") {
  Dataset data;
  data.d = 2;
  Realization r;
  r.id = "ties";
  r.t_minus = 0.0;
  r.t_plus = 10.0;
  r.events = {{3.0, 1}, {3.0, 2}, {5.0, 1}};
  data.realizations.push_back(r);

  const int K = 2;
  const double alpha = 0.7;
  const FeatureSet fs = build_event_features(data, K, alpha);
  const ParamLayout layout{2, K};

  // Rows are grouped by target type: target 1 owns events 0 and 2.
  REQUIRE(fs.rows_for_target(1) == 2);
  REQUIRE(fs.rows_for_target(2) == 1);

  // Both tied events have an empty strict past.
  const double* tied1 = fs.row(fs.target_offset[1]);
  const double* tied2 = fs.row(fs.target_offset[2]);
  for (int k = 1; k <= K; ++k) {
    for (int u = 1; u <= 2; ++u) {
      CHECK(tied1[layout.idx(u, k)] == 0.0);
      CHECK(tied2[layout.idx(u, k)] == 0.0);
    }
    // Background features depend only on the (shared) event time.
    CHECK(tied1[layout.idx(0, k)] ==
          doctest::Approx(std::exp(-(k - 1) * alpha * 3.0)).epsilon(1e-14));
    CHECK(tied2[layout.idx(0, k)] == tied1[layout.idx(0, k)]);
  }

  // The later event sees both tied events, each at lag 2.
  const double* late = fs.row(fs.target_offset[1] + 1);
  for (int k = 1; k <= K; ++k) {
    const double expected = std::exp(-k * alpha * 2.0);
    CHECK(late[layout.idx(1, k)] == doctest::Approx(expected).epsilon(1e-13));
    CHECK(late[layout.idx(2, k)] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("recursive construction agrees with the quadratic reference") {
  Rng rng(2024);
  const double alphas[] = {0.5, 1.0, 2.3};
  for (int trial = 0; trial < 15; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform(0, 4));
    const int K = 1 + static_cast<int>(rng.uniform(0, 3));
    const double alpha = alphas[trial % 3];
    const Dataset data = testutil::random_dataset(rng, d, 4, 40);

    const FeatureSet fast = build_event_features(data, K, alpha);
    const FeatureSet slow = bruteforce_event_features(data, K, alpha);

    REQUIRE(fast.rows() == slow.rows());
    REQUIRE(fast.target_offset == slow.target_offset);
    REQUIRE(fast.a.size() == slow.a.size());
    for (std::size_t i = 0; i < fast.a.size(); ++i) {
      CHECK_MESSAGE(close(fast.a[i], slow.a[i]),
                    "A entry ", i, ": ", fast.a[i], " vs ", slow.a[i]);
    }
    REQUIRE(fast.bhat.size() == slow.bhat.size());
    for (std::size_t i = 0; i < fast.bhat.size(); ++i) {
      CHECK_MESSAGE(close(fast.bhat[i], slow.bhat[i], 1e-8, 1e-10),
                    "Bhat entry ", i, ": ", fast.bhat[i], " vs ", slow.bhat[i]);
    }
    for (std::size_t r = 0; r < fast.rows(); ++r) {
      CHECK(fast.event_refs[r].realization == slow.event_refs[r].realization);
      CHECK(fast.event_refs[r].index == slow.event_refs[r].index);
      CHECK(fast.event_refs[r].time == slow.event_refs[r].time);
    }
  }
}

TEST_CASE("features are non-negative and Bhat respects the mass bound") {
  Rng rng(55);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform(0, 3));
    const int K = 1 + static_cast<int>(rng.uniform(0, 4));
    const double alpha = rng.uniform(0.2, 3.0);
    const Dataset data = testutil::random_dataset(rng, d, 3, 50);
    const FeatureSet fs = build_event_features(data, K, alpha);
    const ParamLayout layout{d, K};

    for (double x : fs.a) CHECK(x >= 0.0);
    for (double x : fs.bhat) CHECK(x >= 0.0);

    // Each event contributes at most 1/(k alpha) of integrated mass.
    const auto counts = data.counts_by_type();
    for (int u = 1; u <= d; ++u) {
      for (int k = 1; k <= K; ++k) {
        const double bound = static_cast<double>(counts[static_cast<std::size_t>(u)]) / (k * alpha);
        CHECK(fs.bhat[static_cast<std::size_t>(layout.idx(u, k))] <= bound + 1e-12);
      }
    }
  }
}

TEST_CASE("time shift leaves kernel features fixed and scales background ones") {
  // Dyadic times and a dyadic shift keep the lag arithmetic exact.
  Dataset base;
  base.d = 2;
  {
    Realization r;
    r.id = "a";
    r.t_minus = 0.0;
    r.t_plus = 8.0;
    r.events = {{0.25, 1}, {1.5, 2}, {1.5, 1}, {4.75, 2}};
    base.realizations.push_back(r);
  }
  {
    Realization r;
    r.id = "b";
    r.t_minus = 1.0;
    r.t_plus = 6.0;
    r.events = {{2.25, 1}, {3.5, 2}};
    base.realizations.push_back(r);
  }

  const double delta = 0.5;
  Dataset shifted = base;
  for (auto& r : shifted.realizations) {
    r.t_minus += delta;
    r.t_plus += delta;
    for (auto& e : r.events) e.time += delta;
  }

  const int K = 3;
  const double alpha = 0.9;
  const FeatureSet f0 = build_event_features(base, K, alpha);
  const FeatureSet f1 = build_event_features(shifted, K, alpha);
  const ParamLayout layout{2, K};

  REQUIRE(f0.rows() == f1.rows());
  for (std::size_t r = 0; r < f0.rows(); ++r) {
    for (int k = 1; k <= K; ++k) {
      for (int u = 1; u <= 2; ++u) {
        // Kernel features depend only on lags.
        CHECK(f1.row(r)[layout.idx(u, k)] ==
              doctest::Approx(f0.row(r)[layout.idx(u, k)]).epsilon(1e-13));
      }
      // Background features pick up exp(-(k-1) alpha delta).
      const double scale = std::exp(-(k - 1) * alpha * delta);
      CHECK(f1.row(r)[layout.idx(0, k)] ==
            doctest::Approx(f0.row(r)[layout.idx(0, k)] * scale).epsilon(1e-12));
    }
  }
  for (int k = 1; k <= K; ++k) {
    for (int u = 1; u <= 2; ++u) {
      CHECK(f1.bhat[static_cast<std::size_t>(layout.idx(u, k))] ==
            doctest::Approx(f0.bhat[static_cast<std::size_t>(layout.idx(u, k))])
                .epsilon(1e-13));
    }
    const double scale = std::exp(-(k - 1) * alpha * delta);
    CHECK(f1.bhat[static_cast<std::size_t>(layout.idx(0, k))] ==
          doctest::Approx(f0.bhat[static_cast<std::size_t>(layout.idx(0, k))] *
                          scale)
              .epsilon(1e-12));
  }
  // The k = 1 background entry is the total window length either way.
  CHECK(f0.bhat[static_cast<std::size_t>(layout.idx(0, 1))] == 13.0);
  CHECK(f1.bhat[static_cast<std::size_t>(layout.idx(0, 1))] == 13.0);
}

TEST_CASE("event-free dataset still carries the background integrals") {
  Dataset data;
  data.d = 2;
  Realization r;
  r.id = "empty";
  r.t_minus = 0.0;
  r.t_plus = 5.0;
  data.realizations.push_back(r);

  const int K = 3;
  const double alpha = 0.8;
  const FeatureSet fs = build_event_features(data, K, alpha);
  const ParamLayout layout{2, K};

  CHECK(fs.rows() == 0);
  CHECK(fs.bhat[static_cast<std::size_t>(layout.idx(0, 1))] == 5.0);
  for (int k = 2; k <= K; ++k) {
    const double beta = (k - 1) * alpha;
    const double expected = (1.0 - std::exp(-beta * 5.0)) / beta;
    CHECK(fs.bhat[static_cast<std::size_t>(layout.idx(0, k))] ==
          doctest::Approx(expected).epsilon(1e-14));
  }
  for (int u = 1; u <= 2; ++u) {
    for (int k = 1; k <= K; ++k) {
      CHECK(fs.bhat[static_cast<std::size_t>(layout.idx(u, k))] == 0.0);
    }
  }
}

TEST_CASE("grid features sample the same statistics pointwise") {
  const int K = 2;
  const double alpha = 1.0;
  const ParamLayout layout{1, K};

  SUBCASE("event-free window") {
    Dataset data;
    data.d = 1;
    Realization r;
    r.id = "flat";
    r.t_minus = 0.0;
    r.t_plus = 2.0;
    data.realizations.push_back(r);

    const GridFeatures gf = build_grid_features(data, K, alpha, 0.5);
    REQUIRE(gf.grids.size() == 1);
    const auto& g = gf.grids[0];
    REQUIRE(g.times.size() >= 2);
    CHECK(g.times.front() == 0.0);
    CHECK(g.times.back() == 2.0);
    for (std::size_t i = 1; i < g.times.size(); ++i) {
      CHECK(g.times[i] - g.times[i - 1] <= 0.5 + 1e-12);
      CHECK(g.times[i] > g.times[i - 1]);
    }
    for (std::size_t i = 0; i < g.times.size(); ++i) {
      const double* row = g.b.data() + i * static_cast<std::size_t>(gf.block_dim());
      CHECK(row[layout.idx(0, 1)] == 1.0);
      CHECK(row[layout.idx(0, 2)] ==
            doctest::Approx(std::exp(-alpha * g.times[i])).epsilon(1e-13));
      CHECK(row[layout.idx(1, 1)] == 0.0);
      CHECK(row[layout.idx(1, 2)] == 0.0);
    }
  }

  SUBCASE("single event with strict-past semantics") {
    Dataset data;
    data.d = 1;
    Realization r;
    r.id = "one";
    r.t_minus = 0.0;
    r.t_plus = 2.0;
    r.events = {{1.0, 1}};
    data.realizations.push_back(r);

    const GridFeatures gf = build_grid_features(data, K, alpha, 0.25);
    const auto& g = gf.grids[0];
    bool saw_event_time = false;
    for (std::size_t i = 0; i < g.times.size(); ++i) {
      const double s = g.times[i];
      const double* row = g.b.data() + i * static_cast<std::size_t>(gf.block_dim());
      for (int k = 1; k <= K; ++k) {
        const double expected =
            s <= 1.0 ? 0.0 : std::exp(-k * alpha * (s - 1.0));
        CHECK(row[layout.idx(1, k)] == doctest::Approx(expected).epsilon(1e-13));
      }
      if (s == 1.0) saw_event_time = true;
    }
    CHECK(saw_event_time);  // grids must include every event time
    // At the right endpoint the lag is exactly 1.
    const double* last =
        g.b.data() + (g.times.size() - 1) * static_cast<std::size_t>(gf.block_dim());
    CHECK(last[layout.idx(1, 1)] ==
          doctest::Approx(0.36787944117144233).epsilon(1e-13));
  }

  SUBCASE("grid rows at event times equal the event feature rows") {
    Rng rng(99);
    const Dataset data = testutil::random_dataset(rng, 3, 2, 25);
    const FeatureSet fs = build_event_features(data, 2, 0.6);
    const GridFeatures gf = build_grid_features(data, 2, 0.6, 0.4);
    REQUIRE(gf.grids.size() == data.realizations.size());

    for (std::size_t rr = 0; rr < fs.rows(); ++rr) {
      const auto& ref = fs.event_refs[rr];
      const auto& g = gf.grids[ref.realization];
      std::size_t hit = g.times.size();
      for (std::size_t i = 0; i < g.times.size(); ++i) {
        if (g.times[i] == ref.time) {
          hit = i;
          break;
        }
      }
      REQUIRE(hit < g.times.size());
      const double* grow = g.b.data() + hit * static_cast<std::size_t>(gf.block_dim());
      const double* arow = fs.row(rr);
      for (int j = 0; j < gf.block_dim(); ++j) {
        CHECK(grow[j] == doctest::Approx(arow[j]).epsilon(1e-12));
      }
    }
  }
}
