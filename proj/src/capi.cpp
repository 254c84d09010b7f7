// C ABI over the C++ core.  Each handle is a thin struct owning one core
// value; every fallible entry point funnels through wrap(), which converts
// the library's exception taxonomy into status codes and keeps the message
// in a per-thread slot for memip_last_error().
#include "memip.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "memip/basis.hpp"
#include "memip/eval.hpp"
#include "memip/experiments.hpp"
#include "memip/fit.hpp"
#include "memip/io.hpp"
#include "memip/simulate.hpp"
#include "memip/types.hpp"

struct memip_dataset {
  memip::Dataset v;
};
struct memip_model {
  memip::ExpSumModel v;
};
struct memip_truth {
  memip::GroundTruthModel v;
};
struct memip_fit_result {
  memip::FitResult v;
};

namespace {

thread_local std::string t_last_error;

// Runs fn, mapping config_error -> 2, numeric_error -> 3, io_error -> 4.
// Anything else unexpected (bad_alloc, Eigen asserts rethrown as
// std::exception, ...) is reported as a numeric failure rather than
// crossing the C boundary as an exception.
template <typename Fn>
memip_status wrap(Fn&& fn) {
  try {
    fn();
    return MEMIP_OK;
  } catch (const memip::config_error& e) {
    t_last_error = e.what();
    return MEMIP_ERR_CONFIG;
  } catch (const memip::io_error& e) {
    t_last_error = e.what();
    return MEMIP_ERR_IO;
  } catch (const memip::numeric_error& e) {
    t_last_error = e.what();
    return MEMIP_ERR_NUMERIC;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return MEMIP_ERR_NUMERIC;
  } catch (...) {
    t_last_error = "unknown failure";
    return MEMIP_ERR_NUMERIC;
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw memip::config_error(message);
}

std::string scenario_string(const memip_sim_config& config) {
  const std::size_t len =
      strnlen(config.scenario, sizeof(config.scenario));
  require(len < sizeof(config.scenario),
          "sim config: scenario name is not NUL-terminated");
  return std::string(config.scenario, len);
}

memip::SimConfig to_core(const memip_sim_config& config) {
  memip::SimConfig cfg;
  cfg.scenario = memip::parse_scenario(scenario_string(config));
  cfg.d = config.d;
  cfg.p = config.p;
  cfg.t_minus = config.t_minus;
  cfg.t_plus = config.t_plus;
  cfg.n_realizations = config.n_realizations;
  cfg.seed = config.seed;
  cfg.mu = config.mu;
  cfg.mu_max = config.mu_max;
  return cfg;
}

void from_core(const memip::SimConfig& cfg, memip_sim_config& config) {
  const std::string name = memip::scenario_name(cfg.scenario);
  std::snprintf(config.scenario, sizeof(config.scenario), "%s", name.c_str());
  config.d = cfg.d;
  config.p = cfg.p;
  config.t_minus = cfg.t_minus;
  config.t_plus = cfg.t_plus;
  config.n_realizations = cfg.n_realizations;
  config.seed = cfg.seed;
  config.mu = cfg.mu;
  config.mu_max = cfg.mu_max;
}

// Model component coordinates shared by coef/value/integral accessors:
// target v in [1, d], source u in [0, d] (0 = background).
void require_component(const memip::ExpSumModel& model, int v, int u) {
  require(v >= 1 && v <= model.d,
          "model access: target index " + std::to_string(v) +
              " outside [1, " + std::to_string(model.d) + "]");
  require(u >= 0 && u <= model.d,
          "model access: source index " + std::to_string(u) +
              " outside [0, " + std::to_string(model.d) + "]");
}

}  // namespace

extern "C" {

const char* memip_last_error(void) { return t_last_error.c_str(); }

const char* memip_version(void) { return "1.0.0"; }

/* ---------------------------------------------------------------- handles */

void memip_dataset_free(memip_dataset* data) { delete data; }
void memip_model_free(memip_model* model) { delete model; }
void memip_truth_free(memip_truth* truth) { delete truth; }
void memip_fit_result_free(memip_fit_result* result) { delete result; }

/* ----------------------------------------------------------------- events */

memip_status memip_dataset_load(const char* path, memip_dataset** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr,
            "memip_dataset_load: NULL argument");
    auto handle = std::make_unique<memip_dataset>();
    handle->v = memip::load_events(path);
    *out = handle.release();
  });
}

memip_status memip_dataset_save(const memip_dataset* data, const char* path) {
  return wrap([&] {
    require(data != nullptr && path != nullptr,
            "memip_dataset_save: NULL argument");
    memip::save_events(data->v, path);
  });
}

int memip_dataset_d(const memip_dataset* data) {
  return data != nullptr ? data->v.d : 0;
}

long long memip_dataset_realizations(const memip_dataset* data) {
  return data != nullptr ? static_cast<long long>(data->v.realizations.size())
                         : 0;
}

long long memip_dataset_events(const memip_dataset* data) {
  return data != nullptr ? static_cast<long long>(data->v.total_events()) : 0;
}

/* ----------------------------------------------------------------- models */

memip_status memip_model_load(const char* path, memip_model** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr,
            "memip_model_load: NULL argument");
    auto handle = std::make_unique<memip_model>();
    handle->v = memip::load_model(path);
    *out = handle.release();
  });
}

memip_status memip_model_save(const memip_model* model, const char* path) {
  return wrap([&] {
    require(model != nullptr && path != nullptr,
            "memip_model_save: NULL argument");
    memip::save_model(model->v, path);
  });
}

int memip_model_d(const memip_model* model) {
  return model != nullptr ? model->v.d : 0;
}

int memip_model_k(const memip_model* model) {
  return model != nullptr ? model->v.K : 0;
}

double memip_model_alpha(const memip_model* model) {
  return model != nullptr ? model->v.alpha : 0.0;
}

memip_status memip_model_coef(const memip_model* model, int v, int u, int k,
                              double* out) {
  return wrap([&] {
    require(model != nullptr && out != nullptr,
            "memip_model_coef: NULL argument");
    require_component(model->v, v, u);
    require(k >= 1 && k <= model->v.K,
            "model access: basis index " + std::to_string(k) +
                " outside [1, " + std::to_string(model->v.K) + "]");
    *out = model->v.at(v, u, k);
  });
}

memip_status memip_model_value(const memip_model* model, int v, int u,
                               double t, double* out) {
  return wrap([&] {
    require(model != nullptr && out != nullptr,
            "memip_model_value: NULL argument");
    require_component(model->v, v, u);
    *out = memip::reconstruct(model->v, v, u, t);
  });
}

memip_status memip_model_integral(const memip_model* model, int v, int u,
                                  double t_max, double* out) {
  return wrap([&] {
    require(model != nullptr && out != nullptr,
            "memip_model_integral: NULL argument");
    require_component(model->v, v, u);
    *out = memip::reconstruct_integral(model->v, v, u, t_max);
  });
}

memip_status memip_truth_load(const char* path, memip_truth** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr,
            "memip_truth_load: NULL argument");
    auto handle = std::make_unique<memip_truth>();
    handle->v = memip::load_truth(path);
    *out = handle.release();
  });
}

memip_status memip_truth_save(const memip_truth* truth, const char* path) {
  return wrap([&] {
    require(truth != nullptr && path != nullptr,
            "memip_truth_save: NULL argument");
    memip::save_truth(truth->v, path);
  });
}

int memip_truth_d(const memip_truth* truth) {
  return truth != nullptr ? truth->v.d : 0;
}

memip_status memip_truth_spectral_radius(const memip_truth* truth,
                                         double* out) {
  return wrap([&] {
    require(truth != nullptr && out != nullptr,
            "memip_truth_spectral_radius: NULL argument");
    *out = memip::spectral_radius(truth->v);
  });
}

memip_status memip_model_spectral_radius(const memip_model* model,
                                         double* out) {
  return wrap([&] {
    require(model != nullptr && out != nullptr,
            "memip_model_spectral_radius: NULL argument");
    *out = memip::spectral_radius(model->v);
  });
}

/* ------------------------------------------------------------- simulation */

void memip_sim_config_init(memip_sim_config* config) {
  if (config == nullptr) return;
  from_core(memip::SimConfig{}, *config);
}

memip_status memip_sim_config_load(const char* path,
                                   memip_sim_config* config) {
  return wrap([&] {
    require(path != nullptr && config != nullptr,
            "memip_sim_config_load: NULL argument");
    from_core(memip::load_sim_config(path), *config);
  });
}

memip_status memip_sim_config_save(const memip_sim_config* config,
                                   const char* path) {
  return wrap([&] {
    require(config != nullptr && path != nullptr,
            "memip_sim_config_save: NULL argument");
    memip::save_sim_config(to_core(*config), path);
  });
}

memip_status memip_simulate(const memip_sim_config* config, int threads,
                            memip_dataset** out_data,
                            memip_truth** out_truth) {
  return wrap([&] {
    require(config != nullptr && out_data != nullptr,
            "memip_simulate: NULL argument");
    const memip::SimConfig cfg = to_core(*config);
    auto data = std::make_unique<memip_dataset>();
    auto truth = std::make_unique<memip_truth>();
    data->v = memip::simulate_scenario(
        cfg, out_truth != nullptr ? &truth->v : nullptr, 0, threads);
    *out_data = data.release();
    if (out_truth != nullptr) *out_truth = truth.release();
  });
}

/* -------------------------------------------------------------- learning */

void memip_fit_options_init(memip_fit_options* options) {
  if (options == nullptr) return;
  options->holdout_fraction = 0.2;
  options->nonneg_warm_start = 0;
  options->max_newton_iters = 0;
  options->grad_tol = 0.0;
  options->threads = 0;
}

memip_status memip_fit(const memip_dataset* data, double alpha, int k_max,
                       const memip_fit_options* options,
                       const memip_model* w1, memip_fit_result** out) {
  return wrap([&] {
    require(data != nullptr && out != nullptr, "memip_fit: NULL argument");
    memip_fit_options defaults;
    memip_fit_options_init(&defaults);
    const memip_fit_options& opt = options != nullptr ? *options : defaults;

    memip::FitOptions fit_options;
    fit_options.nonneg_warm_start = opt.nonneg_warm_start != 0;
    fit_options.threads = opt.threads;
    if (opt.max_newton_iters > 0) {
      fit_options.newton.max_iters = opt.max_newton_iters;
    }
    if (opt.grad_tol > 0.0) fit_options.newton.grad_tol = opt.grad_tol;

    const memip::ExpSumModel* start = w1 != nullptr ? &w1->v : nullptr;
    auto handle = std::make_unique<memip_fit_result>();
    handle->v = opt.holdout_fraction > 0.0
                    ? memip::fit_with_selection(data->v, alpha, k_max,
                                                opt.holdout_fraction,
                                                fit_options, start)
                    : memip::memip_fit(data->v, alpha, k_max, fit_options,
                                       start);
    *out = handle.release();
  });
}

int memip_fit_result_k_max(const memip_fit_result* result) {
  return result != nullptr ? result->v.report.K_max : 0;
}

int memip_fit_result_selected_k(const memip_fit_result* result) {
  return result != nullptr ? result->v.report.selected_K : 0;
}

memip_status memip_fit_result_model(const memip_fit_result* result, int k,
                                    memip_model** out) {
  return wrap([&] {
    require(result != nullptr && out != nullptr,
            "memip_fit_result_model: NULL argument");
    const int K_max = result->v.report.K_max;
    require(k >= 0 && k <= K_max,
            "memip_fit_result_model: order " + std::to_string(k) +
                " outside [0, " + std::to_string(K_max) + "]");
    auto handle = std::make_unique<memip_model>();
    handle->v = k == 0 ? result->v.selected()
                       : result->v.models[static_cast<std::size_t>(k - 1)];
    *out = handle.release();
  });
}

memip_status memip_fit_result_save_report(const memip_fit_result* result,
                                          const char* path) {
  return wrap([&] {
    require(result != nullptr && path != nullptr,
            "memip_fit_result_save_report: NULL argument");
    memip::save_fit_report(result->v.report, path);
  });
}

memip_status memip_exact_refine(const memip_model* model,
                                const memip_dataset* data, double dt,
                                int iterations, memip_model** out) {
  return wrap([&] {
    require(model != nullptr && data != nullptr && out != nullptr,
            "memip_exact_refine: NULL argument");
    auto handle = std::make_unique<memip_model>();
    handle->v = memip::exact_refine(model->v, data->v, dt, iterations);
    *out = handle.release();
  });
}

/* ------------------------------------------------------------- evaluation */

memip_status memip_auc(const int* labels, const double* scores, size_t n,
                       double* out) {
  return wrap([&] {
    require(labels != nullptr && scores != nullptr && out != nullptr,
            "memip_auc: NULL argument");
    require(n > 0, "memip_auc: empty input");
    const std::vector<int> l(labels, labels + n);
    const std::vector<double> s(scores, scores + n);
    *out = memip::auc(l, s);
  });
}

memip_status memip_diff_score(const memip_truth* truth,
                              const memip_model* fitted, double t_max,
                              int grid_points, double* out) {
  return wrap([&] {
    require(truth != nullptr && fitted != nullptr && out != nullptr,
            "memip_diff_score: NULL argument");
    *out = memip::diff_score(truth->v, fitted->v, t_max, grid_points);
  });
}

memip_status memip_background_diff_score(const memip_truth* truth,
                                         const memip_model* fitted,
                                         double t_max, int grid_points,
                                         double* out) {
  return wrap([&] {
    require(truth != nullptr && fitted != nullptr && out != nullptr,
            "memip_background_diff_score: NULL argument");
    *out = memip::background_diff_score(truth->v, fitted->v, t_max,
                                        grid_points);
  });
}

memip_status memip_pred_score(const memip_model* model,
                              const memip_dataset* test,
                              const memip_truth* truth, int threads,
                              double* out, int* types_kept,
                              int* uniform_fallbacks) {
  return wrap([&] {
    require(model != nullptr && test != nullptr && out != nullptr,
            "memip_pred_score: NULL argument");
    const memip::PredBreakdown breakdown = memip::pred_score(
        model->v, test->v, truth != nullptr ? &truth->v : nullptr, threads);
    *out = breakdown.value;
    if (types_kept != nullptr) *types_kept = breakdown.types_kept;
    if (uniform_fallbacks != nullptr) {
      *uniform_fallbacks = breakdown.uniform_fallbacks;
    }
  });
}

void memip_config_hash(const char* text, char out[17]) {
  if (out == nullptr) return;
  const std::string digest = memip::config_hash(text != nullptr ? text : "");
  std::snprintf(out, 17, "%s", digest.c_str());
}

/* ------------------------------------------------------- basis projection */

memip_status memip_exp_sum_approx(const double* t, const double* f, size_t n,
                                  int k, double alpha, double t_max,
                                  double* coefficients) {
  return wrap([&] {
    require(t != nullptr && f != nullptr && coefficients != nullptr,
            "memip_exp_sum_approx: NULL argument");
    require(n >= 2, "memip_exp_sum_approx: need at least two samples");
    for (size_t i = 1; i < n; ++i) {
      require(t[i] > t[i - 1],
              "memip_exp_sum_approx: sample times must be strictly "
              "increasing");
    }
    require(t[0] <= 0.0 && t[n - 1] >= t_max,
            "memip_exp_sum_approx: samples must cover [0, t_max]");
    std::vector<double> tv(t, t + n);
    std::vector<double> fv(f, f + n);
    const auto interpolant = [&tv, &fv](double x) {
      if (x <= tv.front()) return fv.front();
      if (x >= tv.back()) return fv.back();
      const auto it = std::upper_bound(tv.begin(), tv.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - tv.begin());
      const double w = (x - tv[j - 1]) / (tv[j] - tv[j - 1]);
      return fv[j - 1] + w * (fv[j] - fv[j - 1]);
    };
    const std::vector<double> c =
        memip::exp_sum_approx(interpolant, k, alpha, t_max);
    std::copy(c.begin(), c.end(), coefficients);
  });
}

double memip_exp_sum_value(const double* coefficients, int k, double alpha,
                           double t) {
  if (coefficients == nullptr || k < 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const std::vector<double> c(coefficients, coefficients + k + 1);
  return memip::exp_sum_value(c, alpha, t);
}

/* ------------------------------------------------------------ experiments */

void memip_reproduce_options_init(memip_reproduce_options* options) {
  if (options == nullptr) return;
  options->seeds = 10;
  options->base_seed = 1;
  options->n_realizations = 0;
  options->k_max = 0;
  options->holdout_fraction = 0.2;
  options->threads = 0;
  options->alphas = nullptr;
  options->n_alphas = 0;
}

memip_status memip_reproduce(const char* study, const char* out_dir,
                             const memip_reproduce_options* options) {
  return wrap([&] {
    require(study != nullptr && out_dir != nullptr,
            "memip_reproduce: NULL argument");
    memip_reproduce_options defaults;
    memip_reproduce_options_init(&defaults);
    const memip_reproduce_options& opt =
        options != nullptr ? *options : defaults;

    memip::ReproduceOptions run;
    run.seeds = opt.seeds;
    run.base_seed = opt.base_seed;
    run.n_realizations = opt.n_realizations;
    run.K_max = opt.k_max;
    run.holdout_fraction = opt.holdout_fraction;
    run.threads = opt.threads;
    if (opt.alphas != nullptr && opt.n_alphas > 0) {
      run.alphas.assign(opt.alphas, opt.alphas + opt.n_alphas);
    }
    memip::reproduce(study, out_dir, run);
  });
}

} /* extern "C" */
