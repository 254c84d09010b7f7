#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "memip/basis.hpp"
#include "memip/io.hpp"
#include "memip/rng.hpp"
#include "memip/types.hpp"

using namespace memip;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Dataset two_event_dataset() {
  Dataset data;
  data.d = 2;
  Realization r;
  r.id = "r0";
  r.t_minus = 0.0;
  r.t_plus = 10.0;
  r.events = {{1.0, 1}, {2.0, 2}};
  data.realizations.push_back(r);
  return data;
}

}  // namespace

TEST_CASE("realization validation rejects broken invariants") {
  Realization r;
  r.id = "r0";
  r.t_minus = 0.0;
  r.t_plus = 5.0;
  r.events = {{1.0, 1}, {2.0, 1}};
  CHECK_NOTHROW(r.validate(1));

  SUBCASE("unsorted events") {
    std::swap(r.events[0], r.events[1]);
    CHECK_THROWS_AS(r.validate(1), config_error);
  }
  SUBCASE("event outside the window") {
    r.events.push_back({7.0, 1});
    CHECK_THROWS_AS(r.validate(1), config_error);
  }
  SUBCASE("empty window") {
    r.t_plus = r.t_minus;
    CHECK_THROWS_AS(r.validate(1), config_error);
  }
  SUBCASE("type out of range") {
    r.events[0].type = 2;
    CHECK_THROWS_AS(r.validate(1), config_error);
    r.events[0].type = 0;
    CHECK_THROWS_AS(r.validate(1), config_error);
  }
  SUBCASE("ties are allowed") {
    r.events = {{1.0, 1}, {1.0, 1}};
    CHECK_NOTHROW(r.validate(1));
  }
}

TEST_CASE("dataset counts and window totals") {
  Dataset data = two_event_dataset();
  CHECK(data.total_events() == 2);
  CHECK(data.total_window() == doctest::Approx(10.0));
  CHECK(data.max_t_plus() == doctest::Approx(10.0));
  const auto counts = data.counts_by_type();
  REQUIRE(counts.size() == 3);
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 1);
  CHECK(counts[2] == 1);
}

TEST_CASE("events file round trip is byte-identical for canonical input") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    Dataset data = testutil::random_dataset(rng, 3, 4, 30);
    // Canonical form: the loader normalizes the earliest window start to 0,
    // which random_dataset already guarantees (first realization starts at 0).
    const std::string path = temp_path("roundtrip.events");
    save_events(data, path);
    const Dataset loaded = load_events(path);
    CHECK(serialize_events(loaded) == serialize_events(data));
    std::filesystem::remove(path);
  }
}

TEST_CASE("loading shifts the earliest window start to zero") {
  Dataset data;
  data.d = 1;
  Realization r;
  r.id = "shifted";
  r.t_minus = 5.0;
  r.t_plus = 8.0;
  r.events = {{6.0, 1}};
  data.realizations.push_back(r);

  const std::string path = temp_path("shifted.events");
  save_events(data, path);
  const Dataset loaded = load_events(path);
  std::filesystem::remove(path);

  REQUIRE(loaded.realizations.size() == 1);
  CHECK(loaded.realizations[0].t_minus == doctest::Approx(0.0));
  CHECK(loaded.realizations[0].t_plus == doctest::Approx(3.0));
  CHECK(loaded.realizations[0].events[0].time == doctest::Approx(1.0));
}

TEST_CASE("events loader classifies failures") {
  CHECK_THROWS_AS(load_events(temp_path("missing.events")), io_error);

  const std::string path = temp_path("garbage.events");
  write_text_file(path, "d 2\nwindow r0 0 10\nevent r0 nonsense 1\n");
  CHECK_THROWS_AS(load_events(path), io_error);
  std::filesystem::remove(path);
}

TEST_CASE("model layout and accessors") {
  ExpSumModel m(2, 3, 0.5);
  CHECK(m.coef.size() == 2u * 3u * 3u);
  m.at(1, 0, 1) = 1.0;
  m.at(2, 1, 3) = -0.25;
  CHECK(m.at(1, 0, 1) == 1.0);
  CHECK(m.at(2, 1, 3) == -0.25);

  // target_block is k-major (ParamLayout order) and round-trips.
  ParamLayout layout{m.d, m.K};
  auto block = m.target_block(2);
  REQUIRE(static_cast<int>(block.size()) == layout.block_dim());
  CHECK(block[static_cast<std::size_t>(layout.idx(1, 3))] == -0.25);
  block[static_cast<std::size_t>(layout.idx(0, 2))] = 0.125;
  m.set_target_block(2, block);
  CHECK(m.at(2, 0, 2) == 0.125);
}

TEST_CASE("model validation") {
  ExpSumModel m(2, 2, 1.0);
  CHECK_NOTHROW(m.validate());
  SUBCASE("non-positive alpha") {
    m.alpha = 0.0;
    CHECK_THROWS_AS(m.validate(), config_error);
  }
  SUBCASE("non-finite entry") {
    m.at(1, 1, 1) = std::nan("");
    CHECK_THROWS_AS(m.validate(), config_error);
  }
  SUBCASE("coefficient buffer of the wrong size") {
    m.coef.pop_back();
    CHECK_THROWS_AS(m.validate(), config_error);
  }
}

TEST_CASE("K=1 model reproduces the single-exponential baseline exactly") {
  const double mu = 0.7;
  const double nu = -0.3;
  const double alpha = 1.3;
  ExpSumModel m(1, 1, alpha);
  m.at(1, 0, 1) = mu;
  m.at(1, 1, 1) = nu;
  for (double t : {0.0, 0.4, 1.7, 9.0}) {
    CHECK(reconstruct(m, 1, 0, t) == mu);  // constant background
    CHECK(reconstruct(m, 1, 1, t) ==
          doctest::Approx(nu * std::exp(-alpha * t)).epsilon(1e-15));
  }
}

TEST_CASE("model file round trip preserves every bit") {
  Rng rng(7);
  ExpSumModel m = testutil::random_feasible_model(rng, 3, 4, 0.7);
  m.at(2, 1, 2) = -1.0 / 3.0;  // not exactly representable in decimal
  const std::string path = temp_path("model.txt");
  save_model(m, path);
  const ExpSumModel loaded = load_model(path);
  std::filesystem::remove(path);

  CHECK(loaded.d == m.d);
  CHECK(loaded.K == m.K);
  CHECK(loaded.alpha == m.alpha);
  REQUIRE(loaded.coef.size() == m.coef.size());
  for (std::size_t i = 0; i < m.coef.size(); ++i) {
    CHECK(loaded.coef[i] == m.coef[i]);
  }
}

TEST_CASE("truth file round trip across descriptor kinds") {
  GroundTruthModel truth(2);
  truth.background(1).kind = Background::Kind::Constant;
  truth.background(1).value = 0.25;
  truth.background(2).kind = Background::Kind::CosineDecay;
  truth.background(2).sine = true;
  truth.background(2).omega = 7.5;
  truth.kernel(1, 1).kind = Kernel::Kind::SinPowerLaw;
  truth.kernel(1, 1).nu = -0.4;
  truth.kernel(1, 1).omega = 3.0;
  truth.kernel(1, 1).phase = 1.5707963267948966;
  truth.kernel(1, 2).kind = Kernel::Kind::ExpSum;
  truth.kernel(1, 2).alpha = 2.0;
  truth.kernel(1, 2).coef = {0.1, -0.05};
  // kernels (2,1), (2,2) stay Zero.

  const std::string path = temp_path("truth.txt");
  save_truth(truth, path);
  const GroundTruthModel loaded = load_truth(path);
  std::filesystem::remove(path);

  CHECK(loaded.d == 2);
  CHECK(loaded.background(1).value == 0.25);
  CHECK(loaded.background(2).sine);
  CHECK(loaded.background(2).omega == 7.5);
  CHECK(loaded.kernel(1, 1).nu == -0.4);
  CHECK(loaded.kernel(1, 2).coef == truth.kernel(1, 2).coef);
  CHECK(loaded.kernel(2, 2).kind == Kernel::Kind::Zero);
  for (double t : {0.0, 0.3, 2.0, 11.0}) {
    CHECK(loaded.background(2)(t) == doctest::Approx(truth.background(2)(t)));
    CHECK(loaded.kernel(1, 1)(t) == doctest::Approx(truth.kernel(1, 1)(t)));
  }
}

TEST_CASE("format_double parses back losslessly at full precision") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double x = (rng.u01() - 0.5) * std::pow(10.0, rng.uniform(-8, 8));
    const std::string s = format_double(x);
    CHECK(parse_double(s, "test") == x);
  }
  CHECK(format_double(0.1, 15) == "0.1");
  CHECK(format_double(2.0, 15) == "2");
}

TEST_CASE("csv cells carry 15 significant digits") {
  CHECK(CsvWriter::cell(0.1) == "0.1");
  CHECK(CsvWriter::cell(1.0 / 3.0) == "0.333333333333333");
}

TEST_CASE("background and kernel descriptor evaluation") {
  Background cosine;
  cosine.kind = Background::Kind::CosineDecay;
  cosine.omega = 10.0;
  CHECK(cosine(0.0) == doctest::Approx(3.0));  // (cos 0 + 2) / (1 + 0)
  CHECK(cosine.majorant(0.0) >= cosine(0.0));
  CHECK(cosine.majorant(2.0) >= cosine(5.0));  // non-increasing bound

  Kernel sinpow;
  sinpow.kind = Kernel::Kind::SinPowerLaw;
  sinpow.nu = -0.5;
  sinpow.omega = 4.0;
  sinpow.phase = 0.0;
  CHECK(sinpow(0.0) == doctest::Approx(-0.5 * 2.0 / 3.0));
  for (double s : {0.0, 0.5, 2.0}) {
    CHECK(sinpow.envelope(s) >= std::abs(sinpow(s + 1.3)));
    CHECK(sinpow.envelope(s) >= std::abs(sinpow(s)));
  }
  // Tail integral dominates a Riemann sum of |g| over [s, s + 50].
  const double s0 = 1.0;
  double riemann = 0.0;
  for (int i = 0; i < 50000; ++i) riemann += std::abs(sinpow(s0 + i * 1e-3)) * 1e-3;
  CHECK(sinpow.envelope_tail(s0) >= riemann);
}
