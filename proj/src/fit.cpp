#include "memip/fit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "memip/io.hpp"
#include "memip/likelihood.hpp"
#include "memip/parallel.hpp"

namespace memip {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Relaxed objective of one target restricted to the leading (d+1)*k block.
class TargetObjective final : public NewtonObjective {
 public:
  TargetObjective(const FeatureSet& fs, int v, int n) : fs_(fs), v_(v), n_(n) {}

  [[nodiscard]] int dim() const override { return n_; }

  [[nodiscard]] double value(const Eigen::VectorXd& x) const override {
    return relaxed_value_target(fs_, v_, x);
  }

  void grad_hess(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                 Eigen::MatrixXd& hess) const override {
    relaxed_grad_hess_target(fs_, v_, x, grad, hess);
  }

 private:
  const FeatureSet& fs_;
  int v_;
  int n_;
};

struct TargetChainResult {
  // blocks[k-1]: optimal coefficients of the order-k subproblem.
  std::vector<Eigen::VectorXd> blocks;
  std::vector<NewtonResult> stats;  // per k (x dropped to save memory)
  bool empty{false};
};

TargetChainResult fit_target_chain(const FeatureSet& fs, int v, int K_max,
                                   const FitOptions& options,
                                   const ExpSumModel* w1) {
  const int d = fs.d;
  TargetChainResult out;
  out.blocks.reserve(static_cast<std::size_t>(K_max));
  out.stats.reserve(static_cast<std::size_t>(K_max));

  if (fs.rows_for_target(v) == 0) {
    // No events of this type: the relaxed objective is linear and unbounded;
    // the canonical degenerate answer is the zero block (rate 0 everywhere).
    out.empty = true;
    for (int k = 1; k <= K_max; ++k) {
      out.blocks.emplace_back(Eigen::VectorXd::Zero((d + 1) * k));
      out.stats.emplace_back();
    }
    return out;
  }

  Eigen::VectorXd x;
  if (w1) {
    const std::vector<double> block = w1->target_block(v);
    x = Eigen::Map<const Eigen::VectorXd>(
        block.data(), static_cast<Eigen::Index>(block.size()));
    const std::string bad = first_infeasible_event(fs, v, x);
    if (!bad.empty()) {
      throw numeric_error(
          "memip_fit: supplied starting point is infeasible for target " +
          std::to_string(v) + ": non-positive predicted rate at " + bad);
    }
  } else {
    x = default_start(fs, v);
  }

  for (int k = 1; k <= K_max; ++k) {
    const int n = (d + 1) * k;
    // Zero-pad the previous optimum into the enlarged basis; the objective
    // value is unchanged, so the chain never regresses.
    Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
    start.head(x.size()) = x;

    TargetObjective objective(fs, v, n);
    NewtonResult res = newton_argmax(objective, start, options.newton);
    if (options.nonneg_warm_start) {
      NewtonResult alt =
          newton_argmax(objective, nonneg_warm_start(fs, v, k), options.newton);
      if (alt.objective > res.objective) res = std::move(alt);
    }
    x = res.x;
    out.blocks.push_back(res.x);
    res.x.resize(0);
    out.stats.push_back(std::move(res));
  }
  return out;
}

}  // namespace

Eigen::VectorXd default_start(const FeatureSet& fs, int v) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(fs.d + 1);
  const double window = fs.total_window > 0.0 ? fs.total_window : 1.0;
  const double rate =
      static_cast<double>(fs.rows_for_target(v)) / window;
  x[0] = std::max(rate, 1e-8);  // background constant; coordinate (u=0, k=1)
  return x;
}

Eigen::VectorXd nonneg_warm_start(const FeatureSet& fs, int v, int k_order) {
  if (k_order < 1 || k_order > fs.K) {
    throw config_error("nonneg_warm_start: k out of range");
  }
  const int d = fs.d;
  const int n = (d + 1) * k_order;
  const std::size_t begin = fs.target_offset[static_cast<std::size_t>(v)];
  const std::size_t end = fs.target_offset[static_cast<std::size_t>(v) + 1];

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1e-3);
  x[0] = std::max(static_cast<double>(end - begin) /
                      std::max(fs.total_window, 1e-300),
                  1e-8);
  if (begin == end) return Eigen::VectorXd::Zero(n);

  // Coordinates with zero integrated exposure never influence any rate;
  // keep them at zero so the multiplicative update is well defined.
  for (int j = 0; j < n; ++j) {
    if (fs.bhat[static_cast<std::size_t>(j)] == 0.0) x[j] = 0.0;
  }

  double value = relaxed_value_target(fs, v, x);
  Eigen::VectorXd numer(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    // x_j <- x_j * (sum_i a_ij / (a_i . x)) / bhat_j: the classic
    // multiplicative ascent step for sum_i ln(a_i . x) - b . x over x >= 0.
    numer.setZero();
    for (std::size_t r = begin; r < end; ++r) {
      const double* row = fs.row(r);
      double rate = 0.0;
      for (int j = 0; j < n; ++j) rate += row[j] * x[j];
      const double w = 1.0 / rate;
      for (int j = 0; j < n; ++j) numer[j] += row[j] * w;
    }
    for (int j = 0; j < n; ++j) {
      const double b = fs.bhat[static_cast<std::size_t>(j)];
      if (b > 0.0 && x[j] > 0.0) x[j] *= numer[j] / b;
    }
    x[0] = std::max(x[0], 1e-8);
    const double next = relaxed_value_target(fs, v, x);
    const bool settled =
        std::abs(next - value) <= 1e-6 * (std::abs(value) + 1e-300);
    value = next;
    if (settled) break;
  }
  return x;
}

FitResult memip_fit(const FeatureSet& fs, int K_max, const FitOptions& options,
                    const ExpSumModel* w1) {
  if (K_max < 1 || K_max > fs.K) {
    throw config_error("memip_fit: K_max must lie in [1, features.K]");
  }
  if (w1) {
    if (w1->d != fs.d || w1->K != 1 || w1->alpha != fs.alpha) {
      throw config_error(
          "memip_fit: w1 must be a K=1 model matching the data dimension "
          "and alpha");
    }
  }

  const int d = fs.d;
  FitResult result;
  result.report.alpha = fs.alpha;
  result.report.K_max = K_max;

  const auto t0 = Clock::now();
  std::vector<TargetChainResult> chains(static_cast<std::size_t>(d));
  parallel_for(static_cast<std::size_t>(d), resolve_threads(options.threads),
               [&](std::size_t i) {
                 chains[i] = fit_target_chain(fs, static_cast<int>(i) + 1,
                                              K_max, options, w1);
               });
  result.report.seconds_optimize = seconds_since(t0);

  for (int v = 1; v <= d; ++v) {
    if (chains[static_cast<std::size_t>(v - 1)].empty) {
      result.report.empty_targets.push_back(v);
    }
  }

  result.models.reserve(static_cast<std::size_t>(K_max));
  for (int k = 1; k <= K_max; ++k) {
    ExpSumModel model(d, k, fs.alpha);
    KFitStats stats;
    stats.k = k;
    for (int v = 1; v <= d; ++v) {
      const auto& chain = chains[static_cast<std::size_t>(v - 1)];
      const Eigen::VectorXd& block = chain.blocks[static_cast<std::size_t>(k - 1)];
      model.set_target_block(
          v, std::vector<double>(block.data(), block.data() + block.size()));
      if (chain.empty) continue;
      const NewtonResult& nr = chain.stats[static_cast<std::size_t>(k - 1)];
      stats.objective += nr.objective;
      stats.newton_iters += nr.iterations;
      stats.grad_norm = std::max(stats.grad_norm, nr.grad_norm);
      stats.used_ridge = stats.used_ridge || nr.used_ridge;
      stats.line_search_failed = stats.line_search_failed || nr.line_search_failed;
      stats.ascent_violations += nr.ascent_violations;
    }
    result.report.per_k.push_back(stats);
    result.models.push_back(std::move(model));
  }
  return result;
}

FitResult memip_fit(const Dataset& data, double alpha, int K_max,
                    const FitOptions& options, const ExpSumModel* w1) {
  const auto t0 = Clock::now();
  const FeatureSet fs = build_event_features(data, K_max, alpha);
  const double fsec = seconds_since(t0);
  FitResult result = memip_fit(fs, K_max, options, w1);
  result.report.seconds_features = fsec;
  return result;
}

FitResult fit_with_selection(const Dataset& data, double alpha, int K_max,
                             double holdout_fraction, const FitOptions& options,
                             const ExpSumModel* w1) {
  const auto [train, validation] = split_dataset(data, holdout_fraction);
  FitResult result = memip_fit(train, alpha, K_max, options, w1);
  if (validation.realizations.empty()) return result;

  const auto t0 = Clock::now();
  result.report.validation_loglik =
      validation_scores(result.models, validation);
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.report.validation_loglik.size(); ++i) {
    if (result.report.validation_loglik[i] >
        result.report.validation_loglik[best]) {
      best = i;
    }
  }
  result.report.selected_K = static_cast<int>(best) + 1;
  result.report.seconds_select = seconds_since(t0);
  return result;
}

std::vector<double> validation_scores(const std::vector<ExpSumModel>& models,
                                      const Dataset& validation) {
  if (models.empty()) throw config_error("select_k: no candidate models");
  if (validation.realizations.empty()) {
    throw config_error("select_k: validation dataset is empty");
  }
  int max_k = 0;
  for (const auto& m : models) {
    if (m.d != models.front().d || m.alpha != models.front().alpha) {
      throw config_error("select_k: candidates disagree on d or alpha");
    }
    max_k = std::max(max_k, m.K);
  }
  const FeatureSet fs =
      build_event_features(validation, max_k, models.front().alpha);
  std::vector<double> scores;
  scores.reserve(models.size());
  for (const auto& m : models) scores.push_back(relaxed_loglik(m, fs));
  return scores;
}

int select_k(const std::vector<ExpSumModel>& models, const Dataset& validation) {
  const std::vector<double> scores = validation_scores(models, validation);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;  // ties keep the smaller index
  }
  return static_cast<int>(best) + 1;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data,
                                          double holdout_fraction) {
  if (!(holdout_fraction >= 0.0) || holdout_fraction >= 1.0) {
    throw config_error("split: holdout fraction must lie in [0, 1)");
  }
  Dataset train, validation;
  train.d = validation.d = data.d;
  if (holdout_fraction == 0.0) {
    train.realizations = data.realizations;
    return {train, validation};
  }
  const auto stride = static_cast<std::size_t>(
      std::max<long long>(2, std::llround(1.0 / holdout_fraction)));
  for (std::size_t i = 0; i < data.realizations.size(); ++i) {
    if ((i + 1) % stride == 0) {
      validation.realizations.push_back(data.realizations[i]);
    } else {
      train.realizations.push_back(data.realizations[i]);
    }
  }
  return {train, validation};
}

ExpSumModel exact_refine(const ExpSumModel& model, const Dataset& data,
                         double dt, int iterations) {
  model.validate();
  data.validate();
  if (iterations < 0) throw config_error("exact_refine: iterations must be >= 0");

  const FeatureSet fs = build_event_features(data, model.K, model.alpha);
  const GridFeatures gf = build_grid_features(data, model.K, model.alpha, dt);
  const int n = (model.d + 1) * model.K;
  const Eigen::VectorXd bhat = bhat_vector(fs);

  ExpSumModel refined = model;
  for (int v = 1; v <= model.d; ++v) {
    const std::vector<double> block = refined.target_block(v);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
        block.data(), static_cast<Eigen::Index>(block.size()));

    // Per-target exact objective and a supergradient.
    auto exact_value = [&](const Eigen::VectorXd& p) {
      double value = relaxed_value_target(fs, v, p);
      if (!std::isfinite(value)) return value;
      for (const auto& grid : gf.grids) {
        for (std::size_t m = 0; m + 1 < grid.times.size(); ++m) {
          const double width = grid.times[m + 1] - grid.times[m];
          if (width <= 0.0) continue;
          const double* row =
              grid.b.data() + m * static_cast<std::size_t>(gf.block_dim());
          double rate = 0.0;
          for (int j = 0; j < n; ++j) rate += row[j] * p[j];
          if (rate < 0.0) value -= -rate * width;
        }
      }
      return value;
    };
    auto supergradient = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
      g = -bhat;
      const std::size_t begin = fs.target_offset[static_cast<std::size_t>(v)];
      const std::size_t end = fs.target_offset[static_cast<std::size_t>(v) + 1];
      for (std::size_t r = begin; r < end; ++r) {
        const double* row = fs.row(r);
        double rate = 0.0;
        for (int j = 0; j < n; ++j) rate += row[j] * p[j];
        const double w = 1.0 / rate;
        for (int j = 0; j < n; ++j) g[j] += row[j] * w;
      }
      for (const auto& grid : gf.grids) {
        for (std::size_t m = 0; m + 1 < grid.times.size(); ++m) {
          const double width = grid.times[m + 1] - grid.times[m];
          if (width <= 0.0) continue;
          const double* row =
              grid.b.data() + m * static_cast<std::size_t>(gf.block_dim());
          double rate = 0.0;
          for (int j = 0; j < n; ++j) rate += row[j] * p[j];
          if (rate < 0.0) {
            for (int j = 0; j < n; ++j) g[j] += width * row[j];
          }
        }
      }
    };

    double best_value = exact_value(x);
    Eigen::VectorXd best = x;
    if (!std::isfinite(best_value)) {
      throw numeric_error("exact_refine: model infeasible on this data");
    }
    Eigen::VectorXd g(n), candidate(n);
    const double base_step = 0.01 * std::max(1.0, x.norm());
    for (int it = 1; it <= iterations; ++it) {
      supergradient(x, g);
      const double gnorm = g.norm();
      if (gnorm <= 1e-12) break;
      double step = base_step / std::sqrt(static_cast<double>(it));
      double value = kInfeasible;
      for (int shrink = 0; shrink < 60; ++shrink) {
        candidate = x + (step / gnorm) * g;
        value = exact_value(candidate);
        if (std::isfinite(value)) break;
        step *= 0.5;
      }
      if (!std::isfinite(value)) break;
      x = candidate;
      if (value > best_value) {
        best_value = value;
        best = x;
      }
    }
    refined.set_target_block(
        v, std::vector<double>(best.data(), best.data() + best.size()));
  }
  return refined;
}

void save_fit_report(const FitReport& report, const std::string& path) {
  std::string out;
  out += "alpha " + format_double(report.alpha, 15) + "\n";
  out += "K_max " + std::to_string(report.K_max) + "\n";
  out += "selected_K " + std::to_string(report.selected_K) + "\n";
  out += "seconds features " + format_double(report.seconds_features, 15) + "\n";
  out += "seconds optimize " + format_double(report.seconds_optimize, 15) + "\n";
  out += "seconds select " + format_double(report.seconds_select, 15) + "\n";
  for (const auto& s : report.per_k) {
    out += "k " + std::to_string(s.k) + " objective " +
           format_double(s.objective, 15) + " newton_iters " +
           std::to_string(s.newton_iters) + " grad_norm " +
           format_double(s.grad_norm, 15) + " ridge " +
           std::to_string(s.used_ridge ? 1 : 0) + " line_search_failed " +
           std::to_string(s.line_search_failed ? 1 : 0) +
           " ascent_violations " + std::to_string(s.ascent_violations) + "\n";
  }
  for (std::size_t i = 0; i < report.validation_loglik.size(); ++i) {
    out += "validation k " + std::to_string(i + 1) + " loglik " +
           format_double(report.validation_loglik[i], 15) + "\n";
  }
  for (int v : report.empty_targets) {
    out += "empty_target " + std::to_string(v) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace memip
