#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "memip/experiments.hpp"
#include "memip/io.hpp"
#include "memip/types.hpp"

using namespace memip;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

bool file_has_line_starting(const std::string& path, const std::string& prefix) {
  const std::string text = read_text_file(path);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line =
        text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (line.rfind(prefix, 0) == 0) return true;
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return false;
}

}  // namespace

TEST_CASE("drop_extremes_mean trims exactly one value from each end") {
  const Aggregate agg =
      drop_extremes_mean({3.0, 1.0, 4.0, 10.0, 2.0, 9.0, 5.0, 8.0, 6.0, 7.0});
  // {1..10} minus {1, 10} averages to 5.5 and spans [2, 9].
  CHECK(agg.mean == doctest::Approx(5.5));
  CHECK(agg.lo == 2.0);
  CHECK(agg.hi == 9.0);

  const Aggregate three = drop_extremes_mean({5.0, 1.0, 9.0});
  CHECK(three.mean == 5.0);
  CHECK(three.lo == 5.0);
  CHECK(three.hi == 5.0);

  CHECK_THROWS_AS(drop_extremes_mean({1.0, 2.0}), config_error);
}

TEST_CASE("study names are validated") {
  CHECK_THROWS_AS(reproduce("nonsense", "/tmp/never-used"), config_error);
}

TEST_CASE("miniature toy study writes its full output bundle") {
  const auto dir = temp_dir("toy_mini");
  ReproduceOptions opt;
  opt.seeds = 3;
  opt.n_realizations = 800;
  opt.K_max = 3;

  const ToyOutcome outcome = reproduce_toy(dir.string(), opt);
  CHECK(outcome.failures.empty());
  REQUIRE(outcome.seeds_ok.size() == 3);
  REQUIRE(outcome.selected_k.size() == 3);
  for (int k : outcome.selected_k) {
    CHECK(k >= 1);
    CHECK(k <= 3);
  }
  // Sign counters partition the successful seeds for every kernel pair.
  for (int pair = 0; pair < 4; ++pair) {
    CHECK(outcome.fitted_positive[static_cast<std::size_t>(pair)] +
              outcome.fitted_negative[static_cast<std::size_t>(pair)] ==
          3);
  }

  // Plot-ready curves: per-seed reconstruction CSVs with 0-based pair names,
  // plus integrals and a summary.
  for (std::uint64_t seed : outcome.seeds_ok) {
    const auto curves = dir / ("curves_seed" + std::to_string(seed) + ".csv");
    REQUIRE(std::filesystem::exists(curves));
    CHECK(file_has_line_starting(curves.string(),
                                 "t,g00_true,g00_fitted,g01_true"));
    CHECK(file_has_line_starting(curves.string(), "0,"));
  }
  CHECK(std::filesystem::exists(dir / "kernel_integrals.csv"));
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  CHECK(std::filesystem::exists(dir / "metrics.csv"));
  CHECK(file_has_line_starting((dir / "metrics.csv").string(),
                               "metric,value,config_hash,seed"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("miniature scaled study compares the two learners per alpha") {
  const auto dir = temp_dir("scaled_mini");
  ReproduceOptions opt;
  opt.seeds = 3;
  opt.n_realizations = 60;
  opt.K_max = 2;
  opt.alphas = {1.0};

  const ScaledOutcome outcome = reproduce_scaled(true, dir.string(), opt);
  CHECK(outcome.name == "scaled2");
  CHECK(outcome.failures.empty());
  REQUIRE(outcome.seeds_ok.size() == 3);
  CHECK(outcome.pred_memip.best_alpha == 1.0);
  CHECK(outcome.pred_exp.best_alpha == 1.0);
  REQUIRE(outcome.pred_memip.by_seed.size() == 3);
  REQUIRE(outcome.diff_memip.by_seed.size() == 3);
  // Diff scores live in [0, 2] by construction.
  for (double v : outcome.diff_memip.by_seed) {
    CHECK(v >= 0.0);
    CHECK(v <= 2.0);
  }

  CHECK(std::filesystem::exists(dir / "metrics.csv"));
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  CHECK(file_has_line_starting((dir / "metrics.csv").string(),
                               "metric,value,config_hash,seed"));
  // The summary table carries both methods.
  const std::string summary = read_text_file((dir / "summary.txt").string());
  CHECK(summary.find("memip") != std::string::npos);
  CHECK(summary.find("exp") != std::string::npos);
  std::filesystem::remove_all(dir);
}
