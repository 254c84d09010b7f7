#include "memip/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "memip/basis.hpp"
#include "memip/features.hpp"
#include "memip/io.hpp"
#include "memip/likelihood.hpp"
#include "memip/parallel.hpp"

namespace memip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Midrank Mann-Whitney statistic; NaN when a class is missing.
double auc_or_nan(const std::vector<int>& labels,
                  const std::vector<double>& scores) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) +
                                  static_cast<double>(j));  // 1-based
    for (std::size_t m = i; m < j; ++m) {
      if (labels[order[m]]) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return kNaN;
  return (positive_rank_sum -
          0.5 * static_cast<double>(positives) *
              static_cast<double>(positives + 1)) /
         (static_cast<double>(positives) * static_cast<double>(negatives));
}

// integral (f - g)^2 and integral f^2 + integral g^2 by a shared trapezoid.
struct PairDistance {
  double numerator{0.0};
  double denominator{0.0};
};

template <typename F, typename G>
PairDistance normalized_distance(const F& truth, const G& fitted, double t_max,
                                 int grid_points) {
  PairDistance out;
  double int_diff = 0.0, int_truth = 0.0, int_fitted = 0.0;
  const double h = t_max / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double t = t_max * i / (grid_points - 1);
    const double w = (i == 0 || i == grid_points - 1) ? 0.5 : 1.0;
    const double ft = truth(t);
    const double gt = fitted(t);
    int_diff += w * (gt - ft) * (gt - ft);
    int_truth += w * ft * ft;
    int_fitted += w * gt * gt;
  }
  out.numerator = h * int_diff;
  out.denominator = h * (int_truth + int_fitted);
  return out;
}

double mean_normalized_distance(const std::vector<PairDistance>& pairs) {
  double total = 0.0;
  for (const auto& p : pairs) {
    if (p.denominator < 1e-15) continue;  // both sides vanish: perfect match
    total += p.numerator / p.denominator;
  }
  return total / static_cast<double>(pairs.size());
}

std::vector<std::size_t> realization_offsets(const Dataset& data) {
  std::vector<std::size_t> offsets;
  offsets.reserve(data.realizations.size() + 1);
  std::size_t total = 0;
  for (const auto& r : data.realizations) {
    offsets.push_back(total);
    total += r.events.size();
  }
  offsets.push_back(total);
  return offsets;
}

std::vector<int> collect_types(const Dataset& data) {
  std::vector<int> types;
  types.reserve(data.total_events());
  for (const auto& r : data.realizations) {
    for (const auto& e : r.events) types.push_back(e.type);
  }
  return types;
}

// Normalizes one row of clipped rates in place; returns true when the row
// had to fall back to the uniform distribution.
bool normalize_row(double* row, int d) {
  double total = 0.0;
  for (int u = 0; u < d; ++u) {
    if (row[u] < 0.0) row[u] = 0.0;
    total += row[u];
  }
  if (total <= 0.0) {
    const double uniform = 1.0 / d;
    for (int u = 0; u < d; ++u) row[u] = uniform;
    return true;
  }
  for (int u = 0; u < d; ++u) row[u] /= total;
  return false;
}

}  // namespace

double auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  if (labels.size() != scores.size()) {
    throw config_error("auc: labels and scores must have equal length");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw config_error("auc: labels must be 0 or 1, got " +
                         std::to_string(label));
    }
  }
  const double value = auc_or_nan(labels, scores);
  if (std::isnan(value)) {
    throw config_error("auc: need at least one positive and one negative");
  }
  return value;
}

double diff_score(const GroundTruthModel& truth, const ExpSumModel& fitted,
                  double t_max, int grid_points) {
  truth.validate();
  fitted.validate();
  if (truth.d != fitted.d) throw config_error("diff: dimension mismatch");
  if (!(t_max > 0.0)) throw config_error("diff: t_max must be > 0");
  if (grid_points < 1000) throw config_error("diff: need >= 1000 grid points");

  std::vector<PairDistance> pairs;
  pairs.reserve(static_cast<std::size_t>(truth.d) * truth.d);
  for (int v = 1; v <= truth.d; ++v) {
    for (int u = 1; u <= truth.d; ++u) {
      const Kernel& g = truth.kernel(v, u);
      pairs.push_back(normalized_distance(
          [&](double t) { return g(t); },
          [&](double t) { return reconstruct(fitted, v, u, t); }, t_max,
          grid_points));
    }
  }
  return mean_normalized_distance(pairs);
}

double background_diff_score(const GroundTruthModel& truth,
                             const ExpSumModel& fitted, double t_max,
                             int grid_points) {
  truth.validate();
  fitted.validate();
  if (truth.d != fitted.d) throw config_error("diff: dimension mismatch");
  if (!(t_max > 0.0)) throw config_error("diff: t_max must be > 0");
  if (grid_points < 1000) throw config_error("diff: need >= 1000 grid points");

  std::vector<PairDistance> pairs;
  pairs.reserve(static_cast<std::size_t>(truth.d));
  for (int v = 1; v <= truth.d; ++v) {
    const Background& mu = truth.background(v);
    pairs.push_back(normalized_distance(
        [&](double t) { return mu(t); },
        [&](double t) { return reconstruct(fitted, v, 0, t); }, t_max,
        grid_points));
  }
  return mean_normalized_distance(pairs);
}

TypeProbabilities type_probabilities(const ExpSumModel& model,
                                     const Dataset& data, int threads) {
  model.validate();
  data.validate();
  if (model.d != data.d) {
    throw config_error("type probabilities: dimension mismatch");
  }

  const FeatureSet fs = build_event_features(data, model.K, model.alpha);
  const std::vector<std::size_t> offsets = realization_offsets(data);
  const int d = data.d;
  const int n = fs.block_dim();

  TypeProbabilities out;
  out.types = collect_types(data);
  out.p.assign(out.types.size() * static_cast<std::size_t>(d), 0.0);

  std::vector<std::vector<double>> blocks;
  blocks.reserve(static_cast<std::size_t>(d));
  for (int u = 1; u <= d; ++u) blocks.push_back(model.target_block(u));

  std::vector<char> uniform(fs.rows(), 0);
  parallel_for(fs.rows(), resolve_threads(threads), [&](std::size_t r) {
    const double* row = fs.row(r);
    const auto& ref = fs.event_refs[r];
    const std::size_t global =
        offsets[static_cast<std::size_t>(ref.realization)] +
        static_cast<std::size_t>(ref.index);
    double* p = out.p.data() + global * static_cast<std::size_t>(d);
    for (int u = 1; u <= d; ++u) {
      const double* block = blocks[static_cast<std::size_t>(u - 1)].data();
      double rate = 0.0;
      for (int j = 0; j < n; ++j) rate += row[j] * block[j];
      p[u - 1] = rate;
    }
    uniform[r] = normalize_row(p, d) ? 1 : 0;
  });
  for (char flag : uniform) out.uniform_fallbacks += flag;
  return out;
}

TypeProbabilities type_probabilities(const GroundTruthModel& truth,
                                     const Dataset& data, int threads) {
  truth.validate();
  data.validate();
  if (truth.d != data.d) {
    throw config_error("type probabilities: dimension mismatch");
  }

  const std::vector<std::size_t> offsets = realization_offsets(data);
  const int d = data.d;
  TypeProbabilities out;
  out.types = collect_types(data);
  out.p.assign(out.types.size() * static_cast<std::size_t>(d), 0.0);

  std::vector<int> fallbacks(data.realizations.size(), 0);
  parallel_for(data.realizations.size(), resolve_threads(threads),
               [&](std::size_t h) {
                 const Realization& real = data.realizations[h];
                 for (std::size_t i = 0; i < real.events.size(); ++i) {
                   const double t = real.events[i].time;
                   double* p =
                       out.p.data() + (offsets[h] + i) * static_cast<std::size_t>(d);
                   for (int u = 1; u <= d; ++u) {
                     // Absolute time, matching the simulator's convention.
                     double rate = truth.background(u)(t);
                     for (std::size_t j = 0; j < real.events.size(); ++j) {
                       const double s = t - real.events[j].time;
                       if (s <= 0.0) break;  // times non-decreasing
                       rate += truth.kernel(u, real.events[j].type)(s);
                     }
                     p[u - 1] = rate;
                   }
                   if (normalize_row(p, d)) ++fallbacks[h];
                 }
               });
  for (int f : fallbacks) out.uniform_fallbacks += f;
  return out;
}

std::vector<double> per_type_auc(const TypeProbabilities& prob, int d) {
  const std::size_t n = prob.types.size();
  std::vector<double> result(static_cast<std::size_t>(d), kNaN);
  std::vector<int> labels(n);
  std::vector<double> scores(n);
  for (int u = 1; u <= d; ++u) {
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = prob.types[i] == u ? 1 : 0;
      scores[i] = prob.p[i * static_cast<std::size_t>(d) +
                         static_cast<std::size_t>(u - 1)];
    }
    result[static_cast<std::size_t>(u - 1)] = auc_or_nan(labels, scores);
  }
  return result;
}

double pred_ratio(const std::vector<double>& model_auc,
                  const std::vector<double>& truth_auc) {
  if (model_auc.size() != truth_auc.size()) {
    throw config_error("pred: AUC vectors must have equal length");
  }
  double model_excess = 0.0, truth_excess = 0.0;
  int kept = 0;
  for (std::size_t u = 0; u < model_auc.size(); ++u) {
    if (std::isnan(model_auc[u]) != std::isnan(truth_auc[u])) {
      throw config_error("pred: AUC vectors disagree on dropped types");
    }
    if (std::isnan(model_auc[u])) continue;
    ++kept;
    model_excess += model_auc[u] - 0.5;
    truth_excess += truth_auc[u] - 0.5;
  }
  if (kept == 0) {
    throw config_error("pred: no type carries both classes in the test data");
  }
  if (std::abs(truth_excess) < 1e-12) {
    throw numeric_error(
        "pred: ground-truth AUC excess is zero; the ratio is undefined");
  }
  return model_excess / truth_excess;
}

PredBreakdown pred_score(const ExpSumModel& model, const Dataset& test,
                         const GroundTruthModel* truth, int threads) {
  const TypeProbabilities model_prob = type_probabilities(model, test, threads);
  PredBreakdown out;
  out.model_auc = per_type_auc(model_prob, test.d);
  out.uniform_fallbacks = model_prob.uniform_fallbacks;

  if (truth) {
    const TypeProbabilities truth_prob =
        type_probabilities(*truth, test, threads);
    out.truth_auc = per_type_auc(truth_prob, test.d);
  }

  double auc_sum = 0.0;
  for (int u = 0; u < test.d; ++u) {
    const double a = out.model_auc[static_cast<std::size_t>(u)];
    if (std::isnan(a)) continue;  // type missing a class: dropped everywhere
    ++out.types_kept;
    auc_sum += a;
  }
  if (out.types_kept == 0) {
    throw config_error("pred: no type carries both classes in the test data");
  }
  out.value = truth ? pred_ratio(out.model_auc, out.truth_auc)
                    : auc_sum / out.types_kept;
  return out;
}

void save_metrics_csv(const std::vector<MetricRow>& rows,
                      const std::string& path) {
  CsvWriter csv(path);
  csv.row({"metric", "value", "config_hash", "seed"});
  for (const auto& r : rows) {
    csv.row({r.metric, CsvWriter::cell(r.value), r.config_hash,
             std::to_string(r.seed)});
  }
}

std::string config_hash(const std::string& text) {
  unsigned long long hash = 14695981039346656037ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

}  // namespace memip
