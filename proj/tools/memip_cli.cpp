// Command-line driver.  Deliberately a pure client of the C API (memip.h):
// everything it does — simulate, fit, evaluate, reproduce, approx — goes
// through the shared library, so the binary doubles as a living example of
// embedding it.  Exit codes are the memip_status values: 0 ok, 2 config,
// 3 numeric, 4 io.
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "memip.h"

namespace {

// Locale-independent shortest general form at 15 significant digits, the
// precision every human-facing output uses.
std::string num(double x) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

int fail(memip_status status) {
  std::fprintf(stderr, "error: %s\n", memip_last_error());
  return static_cast<int>(status);
}

// Returns 0/OK or the failing status, printing the message on failure.
#define TRY(call)                                       \
  do {                                                  \
    const memip_status try_status_ = (call);            \
    if (try_status_ != MEMIP_OK) return fail(try_status_); \
  } while (0)

struct SimulateArgs {
  std::string config_path;
  std::string out_path = "events.txt";
  std::string truth_path;
  std::string scenario;
  int d = 0;
  double p = 0.0;
  double t_minus = 0.0;
  double t_plus = 0.0;
  long long n_realizations = 0;
  std::uint64_t seed = 0;
  double mu = 0.0;
  double mu_max = 0.0;
  int threads = 0;
};

struct FitArgs {
  std::string events_path;
  double alpha = 1.0;
  int k_max = 10;
  std::string out_dir = ".";
  std::string start_path;
  double holdout_fraction = 0.2;
  bool nonneg_warm_start = false;
  bool exact_refine = false;
  double refine_dt = 0.05;
  int refine_iters = 500;
  int max_newton_iters = 0;
  double grad_tol = 0.0;
  int threads = 0;
};

struct EvaluateArgs {
  std::string model_path;
  std::string events_path;
  std::string truth_path;
  std::string out_path = "metrics.csv";
  double t_max = 20.0;
  int grid_points = 10000;
  unsigned long long seed_tag = 0;
  int threads = 0;
};

struct ReproduceArgs {
  std::string study;
  std::string out_dir;
  int seeds = 10;
  std::uint64_t base_seed = 1;
  long long n_realizations = 0;
  int k_max = 0;
  double holdout_fraction = 0.2;
  std::vector<double> alphas;
  int threads = 0;
};

struct ApproxArgs {
  std::string input_path;
  std::string out_path;
  int k = 8;
  double alpha = 0.25;
  double t_max = 0.0;
};

int run_simulate(const SimulateArgs& args, const CLI::App& cmd) {
  memip_sim_config config;
  memip_sim_config_init(&config);
  if (!args.config_path.empty()) {
    TRY(memip_sim_config_load(args.config_path.c_str(), &config));
  }
  // Explicit flags override whatever the config file said.
  if (cmd.count("--scenario") > 0) {
    std::snprintf(config.scenario, sizeof(config.scenario), "%s",
                  args.scenario.c_str());
  }
  if (cmd.count("--d") > 0) config.d = args.d;
  if (cmd.count("--p") > 0) config.p = args.p;
  if (cmd.count("--t-minus") > 0) config.t_minus = args.t_minus;
  if (cmd.count("--t-plus") > 0) config.t_plus = args.t_plus;
  if (cmd.count("--n-realizations") > 0) {
    config.n_realizations = args.n_realizations;
  }
  if (cmd.count("--seed") > 0) config.seed = args.seed;
  if (cmd.count("--mu") > 0) config.mu = args.mu;
  if (cmd.count("--mu-max") > 0) config.mu_max = args.mu_max;

  memip_dataset* data = nullptr;
  memip_truth* truth = nullptr;
  TRY(memip_simulate(&config, args.threads, &data,
                     args.truth_path.empty() ? nullptr : &truth));

  memip_status status = memip_dataset_save(data, args.out_path.c_str());
  if (status == MEMIP_OK && truth != nullptr) {
    status = memip_truth_save(truth, args.truth_path.c_str());
  }
  if (status == MEMIP_OK) {
    std::printf("simulated %lld realizations, %lld events -> %s\n",
                memip_dataset_realizations(data), memip_dataset_events(data),
                args.out_path.c_str());
    if (truth != nullptr) {
      std::printf("ground truth -> %s\n", args.truth_path.c_str());
    }
  }
  memip_dataset_free(data);
  memip_truth_free(truth);
  return status == MEMIP_OK ? 0 : fail(status);
}

int run_fit(const FitArgs& args) {
  memip_dataset* data = nullptr;
  TRY(memip_dataset_load(args.events_path.c_str(), &data));

  memip_model* start = nullptr;
  memip_fit_result* result = nullptr;
  memip_status status = MEMIP_OK;
  if (!args.start_path.empty()) {
    status = memip_model_load(args.start_path.c_str(), &start);
  }
  if (status == MEMIP_OK) {
    memip_fit_options options;
    memip_fit_options_init(&options);
    options.holdout_fraction = args.holdout_fraction;
    options.nonneg_warm_start = args.nonneg_warm_start ? 1 : 0;
    options.max_newton_iters = args.max_newton_iters;
    options.grad_tol = args.grad_tol;
    options.threads = args.threads;
    status = memip_fit(data, args.alpha, args.k_max, &options, start, &result);
  }

  // One model file per fitted order, the selected model under a fixed name,
  // and the per-k report.
  if (status == MEMIP_OK) {
    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) {
      std::fprintf(stderr, "error: cannot create %s: %s\n",
                   args.out_dir.c_str(), ec.message().c_str());
      memip_fit_result_free(result);
      memip_model_free(start);
      memip_dataset_free(data);
      return static_cast<int>(MEMIP_ERR_IO);
    }
  }
  const std::string dir = args.out_dir + "/";
  for (int k = 1; status == MEMIP_OK && k <= memip_fit_result_k_max(result);
       ++k) {
    memip_model* model = nullptr;
    status = memip_fit_result_model(result, k, &model);
    if (status == MEMIP_OK) {
      const std::string path = dir + "model_k" + std::to_string(k) + ".txt";
      status = memip_model_save(model, path.c_str());
    }
    memip_model_free(model);
  }
  memip_model* selected = nullptr;
  if (status == MEMIP_OK) {
    status = memip_fit_result_model(result, 0, &selected);
  }
  if (status == MEMIP_OK) {
    status = memip_model_save(selected, (dir + "model.txt").c_str());
  }
  if (status == MEMIP_OK) {
    status =
        memip_fit_result_save_report(result, (dir + "fit_report.txt").c_str());
  }
  if (status == MEMIP_OK && args.exact_refine) {
    memip_model* refined = nullptr;
    status = memip_exact_refine(selected, data, args.refine_dt,
                                args.refine_iters, &refined);
    if (status == MEMIP_OK) {
      status = memip_model_save(refined, (dir + "model_refined.txt").c_str());
    }
    memip_model_free(refined);
  }
  if (status == MEMIP_OK) {
    const int selected_k = memip_fit_result_selected_k(result);
    if (selected_k > 0) {
      std::printf("selected K = %d of %d -> %smodel.txt\n", selected_k,
                  memip_fit_result_k_max(result), dir.c_str());
    } else {
      std::printf("fitted K = %d (no hold-out selection) -> %smodel.txt\n",
                  memip_fit_result_k_max(result), dir.c_str());
    }
  }

  memip_model_free(selected);
  memip_fit_result_free(result);
  memip_model_free(start);
  memip_dataset_free(data);
  return status == MEMIP_OK ? 0 : fail(status);
}

int run_evaluate(const EvaluateArgs& args) {
  memip_model* model = nullptr;
  TRY(memip_model_load(args.model_path.c_str(), &model));
  memip_dataset* data = nullptr;
  memip_status status = memip_dataset_load(args.events_path.c_str(), &data);
  bool reported = false;
  memip_truth* truth = nullptr;
  if (status == MEMIP_OK && !args.truth_path.empty()) {
    status = memip_truth_load(args.truth_path.c_str(), &truth);
  }

  std::vector<std::pair<std::string, double>> rows;
  double pred = 0.0;
  int types_kept = 0;
  int uniform_fallbacks = 0;
  if (status == MEMIP_OK) {
    status = memip_pred_score(model, data, truth, args.threads, &pred,
                              &types_kept, &uniform_fallbacks);
  }
  if (status == MEMIP_OK) {
    rows.emplace_back("pred", pred);
    std::printf("pred %s (types kept %d, uniform fallbacks %d)\n",
                num(pred).c_str(), types_kept, uniform_fallbacks);
  }
  if (status == MEMIP_OK && truth != nullptr) {
    double diff = 0.0;
    status = memip_diff_score(truth, model, args.t_max, args.grid_points,
                              &diff);
    if (status == MEMIP_OK) {
      rows.emplace_back("diff", diff);
      std::printf("diff %s\n", num(diff).c_str());
      double background_diff = 0.0;
      status = memip_background_diff_score(truth, model, args.t_max,
                                           args.grid_points, &background_diff);
      if (status == MEMIP_OK) {
        rows.emplace_back("background_diff", background_diff);
        std::printf("background_diff %s\n", num(background_diff).c_str());
      }
    }
  }

  if (status == MEMIP_OK) {
    std::ostringstream config;
    config << "evaluate model " << args.model_path << " events "
           << args.events_path << " truth "
           << (args.truth_path.empty() ? "-" : args.truth_path) << " t_max "
           << num(args.t_max) << " grid_points " << args.grid_points;
    char hash[17];
    memip_config_hash(config.str().c_str(), hash);

    std::ofstream out(args.out_path);
    out << "metric,value,config_hash,seed\n";
    for (const auto& [metric, value] : rows) {
      out << metric << ',' << num(value) << ',' << hash << ',' << args.seed_tag
          << '\n';
    }
    if (!out) {
      std::fprintf(stderr, "error: cannot write %s\n", args.out_path.c_str());
      status = MEMIP_ERR_IO;
      reported = true;
    } else {
      std::printf("metrics -> %s\n", args.out_path.c_str());
    }
  }

  memip_truth_free(truth);
  memip_dataset_free(data);
  memip_model_free(model);
  if (status == MEMIP_OK) return 0;
  return reported ? static_cast<int>(status) : fail(status);
}

int run_reproduce(const ReproduceArgs& args) {
  memip_reproduce_options options;
  memip_reproduce_options_init(&options);
  options.seeds = args.seeds;
  options.base_seed = args.base_seed;
  options.n_realizations = args.n_realizations;
  options.k_max = args.k_max;
  options.holdout_fraction = args.holdout_fraction;
  options.threads = args.threads;
  if (!args.alphas.empty()) {
    options.alphas = args.alphas.data();
    options.n_alphas = args.alphas.size();
  }
  TRY(memip_reproduce(args.study.c_str(), args.out_dir.c_str(), &options));
  std::printf("study %s -> %s\n", args.study.c_str(), args.out_dir.c_str());
  return 0;
}

// Input table: one "t value" pair per line, '#' comments, strictly
// increasing t.
int read_table(const std::string& path, std::vector<double>& t,
               std::vector<double>& f) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot read %s\n", path.c_str());
    return MEMIP_ERR_IO;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    double value = 0.0;
    double time = 0.0;
    const char* begin = first.c_str();
    const auto parsed = std::from_chars(begin, begin + first.size(), time);
    if (parsed.ec != std::errc() || parsed.ptr != begin + first.size() ||
        !(ls >> value)) {
      std::fprintf(stderr, "error: %s:%zu: expected \"t value\"\n",
                   path.c_str(), lineno);
      return MEMIP_ERR_CONFIG;
    }
    t.push_back(time);
    f.push_back(value);
  }
  return MEMIP_OK;
}

int run_approx(const ApproxArgs& args, const CLI::App& cmd) {
  std::vector<double> t;
  std::vector<double> f;
  const int read_status = read_table(args.input_path, t, f);
  if (read_status != MEMIP_OK) return read_status;

  const double t_max =
      cmd.count("--t-max") > 0 ? args.t_max : (t.empty() ? 0.0 : t.back());
  std::vector<double> coefficients(static_cast<std::size_t>(args.k) + 1, 0.0);
  TRY(memip_exp_sum_approx(t.data(), f.data(), t.size(), args.k, args.alpha,
                           t_max, coefficients.data()));

  double sup_error = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > t_max) break;
    const double approx =
        memip_exp_sum_value(coefficients.data(), args.k, args.alpha, t[i]);
    sup_error = std::max(sup_error, std::abs(approx - f[i]));
  }

  std::ostringstream body;
  body << "K " << args.k << "\nalpha " << num(args.alpha) << "\nt_max "
       << num(t_max) << "\n";
  for (int k = 0; k <= args.k; ++k) {
    body << "c" << k << " " << num(coefficients[static_cast<std::size_t>(k)])
         << "\n";
  }
  if (args.out_path.empty()) {
    std::fputs(body.str().c_str(), stdout);
  } else {
    std::ofstream out(args.out_path);
    out << body.str();
    if (!out) {
      std::fprintf(stderr, "error: cannot write %s\n", args.out_path.c_str());
      return MEMIP_ERR_IO;
    }
    std::printf("coefficients -> %s\n", args.out_path.c_str());
  }
  std::printf("sup error on the %zu samples in [0, %s]: %s\n", t.size(),
              num(t_max).c_str(), num(sup_error).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("Hawkes-process learning toolkit (library ") +
               memip_version() + ")"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Sample event data by Ogata thinning");
  simulate->add_option("--config", sim.config_path,
                       "\"key value\" config file (flags below override it)");
  simulate->add_option("--out", sim.out_path, "Events file to write")
      ->capture_default_str();
  simulate->add_option("--truth", sim.truth_path,
                       "Also save the generating model here");
  simulate->add_option("--scenario", sim.scenario,
                       "large | toy | poisson | expsum");
  simulate->add_option("--d", sim.d, "Number of event types");
  simulate->add_option("--p", sim.p, "Probability a kernel is excitatory");
  simulate->add_option("--t-minus", sim.t_minus, "Window start");
  simulate->add_option("--t-plus", sim.t_plus, "Window end");
  simulate->add_option("--n-realizations", sim.n_realizations,
                       "Independent windows to sample");
  simulate->add_option("--seed", sim.seed, "Base RNG seed");
  simulate->add_option("--mu", sim.mu, "poisson scenario: rate per type");
  simulate->add_option("--mu-max", sim.mu_max,
                       "large scenario: backgrounds ~ U[0, mu_max]");
  simulate->add_option("--threads", sim.threads,
                       "Worker threads (0 = HAWKES_THREADS, then hardware)");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "Learn an exponential-sum model from an events file");
  fit_cmd->add_option("--events", fit.events_path, "Training events file")
      ->required();
  fit_cmd->add_option("--alpha", fit.alpha, "Decay unit of the basis")
      ->capture_default_str();
  fit_cmd->add_option("--k-max", fit.k_max, "Largest basis order to fit")
      ->capture_default_str();
  fit_cmd->add_option("--out-dir", fit.out_dir, "Directory for model files")
      ->capture_default_str();
  fit_cmd->add_option("--holdout-fraction", fit.holdout_fraction,
                      "Validation slice for selecting K (0 = none)")
      ->capture_default_str();
  fit_cmd->add_flag("--nonneg-warm-start", fit.nonneg_warm_start,
                    "Also try a non-negative start, keep the better");
  fit_cmd->add_flag("--exact-refine", fit.exact_refine,
                    "Refine the selected model on the exact objective");
  fit_cmd->add_option("--refine-dt", fit.refine_dt,
                      "Compensator grid step for --exact-refine")
      ->capture_default_str();
  fit_cmd->add_option("--refine-iters", fit.refine_iters,
                      "Ascent steps for --exact-refine")
      ->capture_default_str();
  fit_cmd->add_option("--start", fit.start_path,
                      "K=1 model file used as the k=1 starting point");
  fit_cmd->add_option("--max-newton-iters", fit.max_newton_iters,
                      "Newton iteration cap (0 = default)");
  fit_cmd->add_option("--grad-tol", fit.grad_tol,
                      "Newton gradient tolerance (0 = default)");
  fit_cmd->add_option("--threads", fit.threads,
                      "Worker threads (0 = HAWKES_THREADS, then hardware)");

  EvaluateArgs eval;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score a model on held-out events, optionally vs a truth");
  evaluate->add_option("--model", eval.model_path, "Model file")->required();
  evaluate->add_option("--events", eval.events_path, "Test events file")
      ->required();
  evaluate->add_option("--truth", eval.truth_path,
                       "Ground truth file (enables diff and the Pred ratio)");
  evaluate->add_option("--out", eval.out_path, "Metrics CSV to write")
      ->capture_default_str();
  evaluate->add_option("--t-max", eval.t_max, "Kernel-distance horizon")
      ->capture_default_str();
  evaluate->add_option("--grid-points", eval.grid_points,
                       "Kernel-distance grid resolution")
      ->capture_default_str();
  evaluate->add_option("--seed-tag", eval.seed_tag,
                       "Seed column value for the CSV rows")
      ->capture_default_str();
  evaluate->add_option("--threads", eval.threads,
                       "Worker threads (0 = HAWKES_THREADS, then hardware)");

  ReproduceArgs rep;
  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "Run a synthetic study end to end (CSV bundle)");
  reproduce->add_option("--study", rep.study, "toy | scaled1 | scaled2")
      ->required();
  reproduce->add_option("--out-dir", rep.out_dir, "Output directory")
      ->required();
  reproduce->add_option("--seeds", rep.seeds, "Independent repetitions")
      ->capture_default_str();
  reproduce->add_option("--base-seed", rep.base_seed, "Seed of repetition 1")
      ->capture_default_str();
  reproduce->add_option("--n-realizations", rep.n_realizations,
                        "0 = the study's default scale")
      ->capture_default_str();
  reproduce->add_option("--k-max", rep.k_max, "0 = the study's default")
      ->capture_default_str();
  reproduce->add_option("--holdout-fraction", rep.holdout_fraction,
                        "Validation slice for selecting K")
      ->capture_default_str();
  reproduce->add_option("--alphas", rep.alphas,
                        "Candidate decay units (scaled studies)");
  reproduce->add_option("--threads", rep.threads,
                        "Worker threads (0 = HAWKES_THREADS, then hardware)");

  ApproxArgs approx;
  CLI::App* approx_cmd = app.add_subcommand(
      "approx", "Project a tabulated function onto the exponential basis");
  approx_cmd
      ->add_option("--input", approx.input_path,
                   "Table file: one \"t value\" pair per line")
      ->required();
  approx_cmd->add_option("--k", approx.k, "Basis order K (K+1 coefficients)")
      ->capture_default_str();
  approx_cmd->add_option("--alpha", approx.alpha, "Decay unit of the basis")
      ->capture_default_str();
  approx_cmd->add_option("--t-max", approx.t_max,
                         "Approximation horizon (default: last sample time)");
  approx_cmd->add_option("--out", approx.out_path,
                         "Coefficients file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(MEMIP_ERR_CONFIG);
  }

  if (simulate->parsed()) return run_simulate(sim, *simulate);
  if (fit_cmd->parsed()) return run_fit(fit);
  if (evaluate->parsed()) return run_evaluate(eval);
  if (reproduce->parsed()) return run_reproduce(rep);
  if (approx_cmd->parsed()) return run_approx(approx, *approx_cmd);
  return static_cast<int>(MEMIP_ERR_CONFIG);
}
