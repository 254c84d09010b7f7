// The chain learner: per-target Newton maximization of the relaxed
// objective, warm-started across increasing basis orders k = 1..K_max
// (growing the basis is zero-padding, which leaves the objective value
// unchanged), with optional non-negative multiplicative warm starts and
// hold-out model selection over k.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "memip/features.hpp"
#include "memip/newton.hpp"
#include "memip/types.hpp"

namespace memip {

struct FitOptions {
  NewtonParams newton{};
  // Also run each Newton solve from a non-negative multiplicative-update
  // start and keep the better optimum.
  bool nonneg_warm_start{false};
  int threads{0};
};

struct KFitStats {
  int k{0};
  double objective{0.0};      // full relaxed log-likelihood at the optimum
  int newton_iters{0};        // summed over targets
  double grad_norm{0.0};      // max over targets at exit
  bool used_ridge{false};
  bool line_search_failed{false};
  int ascent_violations{0};
};

struct FitReport {
  double alpha{0.0};
  int K_max{0};
  int selected_K{0};  // 0 when no selection was performed
  std::vector<KFitStats> per_k;
  std::vector<double> validation_loglik;  // parallel to per_k when selected
  std::vector<int> empty_targets;         // types with zero events (left at 0)
  double seconds_features{0.0};
  double seconds_optimize{0.0};
  double seconds_select{0.0};
};

struct FitResult {
  std::vector<ExpSumModel> models;  // index k-1 holds the order-k model
  FitReport report;

  [[nodiscard]] const ExpSumModel& selected() const {
    const int k = report.selected_K > 0 ? report.selected_K : report.K_max;
    return models[static_cast<std::size_t>(k - 1)];
  }
};

// Default k=1 starting point for target v: empirical Poisson rate for the
// background constant, zeros elsewhere; always feasible.
Eigen::VectorXd default_start(const FeatureSet& fs, int v);

// Non-negative warm start: multiplicative-update ascent on the relaxed
// objective restricted to x >= 0 (at most 100 sweeps or relative objective
// change < 1e-6); the background constant is floored at 1e-8 so the result
// is always feasible.
Eigen::VectorXd nonneg_warm_start(const FeatureSet& fs, int v, int k_order);

// Fits the chain k = 1..K_max.  The FeatureSet variant requires
// fs.K >= K_max; w1, when given, must be a K=1 model fitting the data
// dimensions and feasible (checked, with the offending event named).
FitResult memip_fit(const FeatureSet& fs, int K_max, const FitOptions& options,
                    const ExpSumModel* w1 = nullptr);
FitResult memip_fit(const Dataset& data, double alpha, int K_max,
                    const FitOptions& options = {},
                    const ExpSumModel* w1 = nullptr);

// Fits on data minus a deterministic hold-out slice, scores every k on the
// hold-out, and records selected_K and the validation log-likelihoods in
// the report.  holdout_fraction 0 skips selection (selected_K stays 0).
FitResult fit_with_selection(const Dataset& data, double alpha, int K_max,
                             double holdout_fraction,
                             const FitOptions& options = {},
                             const ExpSumModel* w1 = nullptr);

// Hold-out selection: argmax of the relaxed validation log-likelihood,
// ties to the smallest k.  All models must share d and alpha.
int select_k(const std::vector<ExpSumModel>& models, const Dataset& validation);
std::vector<double> validation_scores(const std::vector<ExpSumModel>& models,
                                      const Dataset& validation);

// Deterministic train/validation split by realization index: every m-th
// realization (m ~ 1/holdout_fraction) goes to validation.  fraction 0
// returns the whole dataset as train and an empty validation set.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data,
                                          double holdout_fraction);

// Optional diagnostic refiner: plain supergradient ascent on the exact
// (clipped) objective from the given model, keeping the best iterate.
// Intended for modest datasets; cost is one grid pass per step.
ExpSumModel exact_refine(const ExpSumModel& model, const Dataset& data,
                         double dt = 0.05, int iterations = 500);

void save_fit_report(const FitReport& report, const std::string& path);

}  // namespace memip
