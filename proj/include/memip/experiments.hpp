// Reproducible synthetic studies: the two-type visualization study (curve
// and sign recovery of an inhibitory kernel) and the scaled 20-type
// prediction/recovery tables comparing the chain learner against its
// single-exponential restriction across alpha.  Every study writes
// plot-ready CSVs plus a summary into its output directory and returns the
// numbers the acceptance checks consume.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "memip/fit.hpp"

namespace memip {

struct ReproduceOptions {
  int seeds{10};
  std::uint64_t base_seed{1};
  // 0 = study default: 20,000 realizations for toy; 2,000 train + 2,000
  // test for the scaled studies (the value sets the train size; test
  // matches it).
  long long n_realizations{0};
  int K_max{0};                // 0 = default 10
  std::vector<double> alphas;  // scaled sweep; empty = {0.1, 1, 10}
  double holdout_fraction{0.2};
  int threads{0};
};

struct SeedFailure {
  std::uint64_t seed{0};
  std::string message;
};

// Drop the single best and worst value, average the rest, and report the
// surviving range (the empirical 10% interval at 10 samples).  Needs at
// least 3 values.
struct Aggregate {
  double mean{0.0};
  double lo{0.0};
  double hi{0.0};
};
Aggregate drop_extremes_mean(std::vector<double> values);

// Two-type study: per seed, simulate, fit (single alpha, hold-out selected
// k), write reconstruction curves and kernel integrals, count recovered
// signs.  Kernel order below is (target, source) = (1,1),(1,2),(2,1),(2,2),
// i.e. the inhibitory self-kernel of type 2 sits at index 3.
struct ToyOutcome {
  std::array<int, 4> fitted_positive{};  // seeds with integral > 0 on [0,20]
  std::array<int, 4> fitted_negative{};
  std::vector<std::uint64_t> seeds_ok;
  std::vector<int> selected_k;  // parallel to seeds_ok
  std::vector<SeedFailure> failures;
};
ToyOutcome reproduce_toy(const std::string& out_dir,
                         const ReproduceOptions& options = {});

// Scaled studies: 20 types, sinusoidal power-law kernels, every kernel
// excitatory (scaled1) or 10% inhibitory (scaled2).  Per seed and alpha the
// chain is fitted on train data; the selected-k model ("memip") and the k=1
// model ("exp") are scored on held-out test realizations.  best_alpha is
// chosen per method by the aggregated metric.
struct MethodTable {
  double best_alpha{0.0};
  Aggregate aggregate;
  std::vector<double> by_seed;  // value at best_alpha, parallel to seeds_ok
};
struct ScaledOutcome {
  std::string name;
  MethodTable pred_memip, pred_exp;
  MethodTable diff_memip, diff_exp;
  std::vector<std::uint64_t> seeds_ok;
  std::vector<SeedFailure> failures;
};
ScaledOutcome reproduce_scaled(bool with_inhibition,
                               const std::string& out_dir,
                               const ReproduceOptions& options = {});

// Dispatch by study name: "toy" | "scaled1" | "scaled2".
void reproduce(const std::string& study, const std::string& out_dir,
               const ReproduceOptions& options = {});

}  // namespace memip
