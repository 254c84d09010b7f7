// Recovery and prediction metrics: normalized L2 distance between true and
// fitted kernels (and backgrounds), and the excess-AUC type-prediction score
// built on per-event type probabilities under a model.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memip/types.hpp"

namespace memip {

// Mann-Whitney AUC, P(score+ > score-) + P(tie)/2, via midranks in
// O(n log n).  Labels are 0/1; both classes must be present.
double auc(const std::vector<int>& labels, const std::vector<double>& scores);

// Mean over ordered pairs (v, u) of the normalized L2 kernel distance
//   integral (fitted - true)^2 / (integral fitted^2 + integral true^2)
// over [0, t_max] by trapezoid on grid_points uniform points; a pair whose
// two integrals are both < 1e-15 contributes 0.  Lies in [0, 2]: 0 for a
// perfect fit, 1 against a zero fit, 2 for a sign flip.
double diff_score(const GroundTruthModel& truth, const ExpSumModel& fitted,
                  double t_max, int grid_points = 10000);

// Same normalized distance applied to the d background intensities.
double background_diff_score(const GroundTruthModel& truth,
                             const ExpSumModel& fitted, double t_max,
                             int grid_points = 10000);

// P_i(u) for every event i of the dataset under a model: the clipped
// intensities at t_i (history strictly before t_i) normalized across types.
// Rows follow dataset order (realization by realization); an event where
// every type has zero clipped intensity is scored uniform 1/d and counted.
struct TypeProbabilities {
  std::vector<double> p;  // total_events x d, row-major
  std::vector<int> types;  // observed type of each event, parallel to rows
  int uniform_fallbacks{0};
};
TypeProbabilities type_probabilities(const ExpSumModel& model,
                                     const Dataset& data, int threads = 0);
TypeProbabilities type_probabilities(const GroundTruthModel& truth,
                                     const Dataset& data, int threads = 0);

// Per-type one-vs-rest AUC of 1{type == u} against P(u); NaN for a type
// missing a class (no positives or no negatives).
std::vector<double> per_type_auc(const TypeProbabilities& prob, int d);

// Excess-AUC ratio  sum_u (AUC_u(model) - 1/2) / sum_u (AUC_u(truth) - 1/2)
// from precomputed per-type AUC vectors; NaN entries mark dropped types and
// must agree between the two (they are determined by the test labels).
double pred_ratio(const std::vector<double>& model_auc,
                  const std::vector<double>& truth_auc);

// Type-prediction score on a held-out dataset.  With a ground truth, the
// ratio  sum_u (AUC_u(model) - 1/2) / sum_u (AUC_u(truth) - 1/2)  over the
// types carrying both classes (1 when the model matches the truth's
// probabilities); without, the plain average AUC over those types.
struct PredBreakdown {
  double value{0.0};
  std::vector<double> model_auc;  // size d, index v-1, NaN = dropped
  std::vector<double> truth_auc;  // empty when no truth was given
  int types_kept{0};
  int uniform_fallbacks{0};
};
PredBreakdown pred_score(const ExpSumModel& model, const Dataset& test,
                         const GroundTruthModel* truth = nullptr,
                         int threads = 0);

// Flat metric rows for plotting; written as CSV with a header line
// "metric,value,config_hash,seed".
struct MetricRow {
  std::string metric;
  double value{0.0};
  std::string config_hash;
  unsigned long long seed{0};
};
void save_metrics_csv(const std::vector<MetricRow>& rows,
                      const std::string& path);

// FNV-1a hex digest of a configuration string, for tagging metric rows.
std::string config_hash(const std::string& text);

}  // namespace memip
