// Exercises the C surface the way an external embedder would: this
// translation unit includes only memip.h and links the shared library,
// never the C++ core headers.  Numeric depth lives in the core suites;
// here the focus is the handle lifecycle, the status/message contract,
// and that values crossing the ABI agree with each other.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <memip.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "memip_capi";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string scratch_path(const std::string& name) {
  return (scratch_dir() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("version string and a clean error buffer") {
  const char* version = memip_version();
  REQUIRE(version != nullptr);
  CHECK(std::strchr(version, '.') != nullptr);
  // No failing call has happened on this thread yet.
  REQUIRE(memip_last_error() != nullptr);
  CHECK(std::string(memip_last_error()).empty());
}

TEST_CASE("sim config defaults, file round trip, and bad loads") {
  memip_sim_config cfg;
  memip_sim_config_init(&cfg);
  CHECK(std::strcmp(cfg.scenario, "large") == 0);
  CHECK(cfg.d == 2);
  CHECK(cfg.p == 1.0);
  CHECK(cfg.t_minus == 0.0);
  CHECK(cfg.t_plus == 20.0);
  CHECK(cfg.n_realizations == 1);
  CHECK(cfg.seed == 1);
  CHECK(cfg.mu == 1.0);
  CHECK(cfg.mu_max == 0.001);
  memip_sim_config_init(nullptr);  // tolerated no-op

  std::strcpy(cfg.scenario, "poisson");
  cfg.d = 3;
  cfg.p = 0.75;
  cfg.t_minus = 1.5;
  cfg.t_plus = 11.5;
  cfg.n_realizations = 42;
  cfg.seed = 977;
  cfg.mu = 0.25;
  cfg.mu_max = 0.05;
  const std::string path = scratch_path("sim.cfg");
  REQUIRE(memip_sim_config_save(&cfg, path.c_str()) == MEMIP_OK);

  memip_sim_config back;
  memip_sim_config_init(&back);
  REQUIRE(memip_sim_config_load(path.c_str(), &back) == MEMIP_OK);
  CHECK(std::strcmp(back.scenario, "poisson") == 0);
  CHECK(back.d == 3);
  CHECK(back.p == 0.75);
  CHECK(back.t_minus == 1.5);
  CHECK(back.t_plus == 11.5);
  CHECK(back.n_realizations == 42);
  CHECK(back.seed == 977);
  CHECK(back.mu == 0.25);
  CHECK(back.mu_max == 0.05);

  CHECK(memip_sim_config_load(scratch_path("no-such.cfg").c_str(), &back) ==
        MEMIP_ERR_IO);
  CHECK(!std::string(memip_last_error()).empty());
  CHECK(memip_sim_config_load(nullptr, &back) == MEMIP_ERR_CONFIG);
}

TEST_CASE("embedder flow: simulate, fit, score, refine, round trips") {
  // Simulate the built-in exponential-sum process.
  memip_sim_config cfg;
  memip_sim_config_init(&cfg);
  std::strcpy(cfg.scenario, "expsum");
  cfg.n_realizations = 200;
  cfg.t_plus = 20.0;
  memip_dataset* data = nullptr;
  memip_truth* truth = nullptr;
  REQUIRE(memip_simulate(&cfg, 1, &data, &truth) == MEMIP_OK);
  REQUIRE(data != nullptr);
  REQUIRE(truth != nullptr);
  CHECK(memip_dataset_d(data) == 2);
  CHECK(memip_dataset_realizations(data) == 200);
  const long long n_events = memip_dataset_events(data);
  CHECK(n_events > 1000);

  // The generating process has branching spectral radius ~0.36957
  // (known in closed form from its kernel integrals).
  double rho = 0.0;
  REQUIRE(memip_truth_spectral_radius(truth, &rho) == MEMIP_OK);
  CHECK(rho == doctest::Approx(0.3695721).epsilon(1e-3));

  // Saving, loading, and saving again must reproduce the file byte for
  // byte -- the event format is lossless.
  const std::string events_a = scratch_path("train.events");
  const std::string events_b = scratch_path("train_copy.events");
  REQUIRE(memip_dataset_save(data, events_a.c_str()) == MEMIP_OK);
  memip_dataset* data2 = nullptr;
  REQUIRE(memip_dataset_load(events_a.c_str(), &data2) == MEMIP_OK);
  CHECK(memip_dataset_events(data2) == n_events);
  CHECK(memip_dataset_realizations(data2) == 200);
  REQUIRE(memip_dataset_save(data2, events_b.c_str()) == MEMIP_OK);
  CHECK(slurp(events_a) == slurp(events_b));

  // Fit a short chain with hold-out selection (the default options).
  memip_fit_result* fit = nullptr;
  REQUIRE(memip_fit(data, 1.0, 3, nullptr, nullptr, &fit) == MEMIP_OK);
  CHECK(memip_fit_result_k_max(fit) == 3);
  const int selected = memip_fit_result_selected_k(fit);
  REQUIRE(selected >= 1);
  REQUIRE(selected <= 3);

  memip_model* model = nullptr;
  REQUIRE(memip_fit_result_model(fit, 0, &model) == MEMIP_OK);
  CHECK(memip_model_d(model) == 2);
  CHECK(memip_model_k(model) == selected);
  CHECK(memip_model_alpha(model) == 1.0);

  // Asking for the selected order explicitly returns the same model.
  memip_model* explicit_model = nullptr;
  REQUIRE(memip_fit_result_model(fit, selected, &explicit_model) == MEMIP_OK);
  for (int v = 1; v <= 2; ++v) {
    for (int u = 0; u <= 2; ++u) {
      for (int k = 1; k <= selected; ++k) {
        double a = 0.0, b = 0.0;
        REQUIRE(memip_model_coef(model, v, u, k, &a) == MEMIP_OK);
        REQUIRE(memip_model_coef(explicit_model, v, u, k, &b) == MEMIP_OK);
        CHECK(a == b);
      }
    }
  }
  memip_model* none = nullptr;
  CHECK(memip_fit_result_model(fit, 4, &none) == MEMIP_ERR_CONFIG);
  CHECK(none == nullptr);  // outputs are written only on success

  const std::string report = scratch_path("fit_report.txt");
  REQUIRE(memip_fit_result_save_report(fit, report.c_str()) == MEMIP_OK);
  CHECK(!slurp(report).empty());

  // Coefficient accessor bounds.
  double c = 0.0;
  REQUIRE(memip_model_coef(model, 1, 0, 1, &c) == MEMIP_OK);
  CHECK(c > 0.0);  // fitted constant background of type 1
  CHECK(memip_model_coef(model, 3, 0, 1, &c) == MEMIP_ERR_CONFIG);
  CHECK(!std::string(memip_last_error()).empty());
  CHECK(memip_model_coef(model, 1, 2, selected + 1, &c) == MEMIP_ERR_CONFIG);

  // value() and integral() must agree with sums over the coefficients:
  // kernels stack exp(-k*alpha*t), backgrounds exp(-(k-1)*alpha*t).
  {
    double value = 0.0, integral = 0.0;
    REQUIRE(memip_model_value(model, 1, 2, 0.5, &value) == MEMIP_OK);
    REQUIRE(memip_model_integral(model, 1, 2, 20.0, &integral) == MEMIP_OK);
    double want_value = 0.0, want_integral = 0.0;
    for (int k = 1; k <= selected; ++k) {
      REQUIRE(memip_model_coef(model, 1, 2, k, &c) == MEMIP_OK);
      want_value += c * std::exp(-k * 0.5);
      want_integral += c * (1.0 - std::exp(-k * 20.0)) / k;
    }
    CHECK(value == doctest::Approx(want_value).epsilon(1e-12));
    CHECK(integral == doctest::Approx(want_integral).epsilon(1e-12));

    REQUIRE(memip_model_value(model, 2, 0, 0.7, &value) == MEMIP_OK);
    REQUIRE(memip_model_integral(model, 2, 0, 5.0, &integral) == MEMIP_OK);
    want_value = 0.0;
    want_integral = 0.0;
    for (int k = 1; k <= selected; ++k) {
      REQUIRE(memip_model_coef(model, 2, 0, k, &c) == MEMIP_OK);
      want_value += c * std::exp(-(k - 1) * 0.7);
      want_integral +=
          k == 1 ? c * 5.0 : c * (1.0 - std::exp(-(k - 1) * 5.0)) / (k - 1);
    }
    CHECK(value == doctest::Approx(want_value).epsilon(1e-12));
    CHECK(integral == doctest::Approx(want_integral).epsilon(1e-12));
  }

  // Model file round trip preserves every coefficient exactly.
  const std::string model_path = scratch_path("model.txt");
  REQUIRE(memip_model_save(model, model_path.c_str()) == MEMIP_OK);
  memip_model* model2 = nullptr;
  REQUIRE(memip_model_load(model_path.c_str(), &model2) == MEMIP_OK);
  CHECK(memip_model_d(model2) == 2);
  CHECK(memip_model_k(model2) == selected);
  CHECK(memip_model_alpha(model2) == 1.0);
  for (int v = 1; v <= 2; ++v) {
    for (int u = 0; u <= 2; ++u) {
      for (int k = 1; k <= selected; ++k) {
        double a = 0.0, b = 0.0;
        REQUIRE(memip_model_coef(model, v, u, k, &a) == MEMIP_OK);
        REQUIRE(memip_model_coef(model2, v, u, k, &b) == MEMIP_OK);
        CHECK(a == b);
      }
    }
  }
  double model_rho = 0.0;
  REQUIRE(memip_model_spectral_radius(model, &model_rho) == MEMIP_OK);
  CHECK(model_rho >= 0.0);
  CHECK(std::isfinite(model_rho));

  // Truth file round trip, then score the fit against it.
  const std::string truth_path = scratch_path("truth.txt");
  REQUIRE(memip_truth_save(truth, truth_path.c_str()) == MEMIP_OK);
  memip_truth* truth2 = nullptr;
  REQUIRE(memip_truth_load(truth_path.c_str(), &truth2) == MEMIP_OK);
  CHECK(memip_truth_d(truth2) == 2);
  double rho2 = 0.0;
  REQUIRE(memip_truth_spectral_radius(truth2, &rho2) == MEMIP_OK);
  CHECK(rho2 == doctest::Approx(rho).epsilon(1e-12));

  double diff = -1.0;
  REQUIRE(memip_diff_score(truth2, model, 20.0, 2000, &diff) == MEMIP_OK);
  CHECK(diff >= 0.0);
  CHECK(diff < 1.0);  // ~5k training events recover the kernels decently
  double bdiff = -1.0;
  REQUIRE(memip_background_diff_score(truth2, model, 20.0, 2000, &bdiff) ==
          MEMIP_OK);
  CHECK(bdiff >= 0.0);
  CHECK(bdiff <= 2.0);

  // Type prediction: plain AUC without a truth, excess ratio with one.
  double pred = 0.0;
  int kept = 0, fallbacks = -1;
  REQUIRE(memip_pred_score(model, data2, nullptr, 1, &pred, &kept,
                           &fallbacks) == MEMIP_OK);
  CHECK(pred > 0.4);
  CHECK(pred <= 1.0);
  CHECK(kept == 2);
  CHECK(fallbacks >= 0);
  double ratio = 0.0;
  REQUIRE(memip_pred_score(model, data2, truth2, 1, &ratio, &kept, nullptr) ==
          MEMIP_OK);
  CHECK(ratio > 0.2);
  CHECK(ratio < 2.5);
  CHECK(kept == 2);

  // Supergradient refinement keeps the model shape.
  memip_model* refined = nullptr;
  REQUIRE(memip_exact_refine(model, data, 0.1, 5, &refined) == MEMIP_OK);
  CHECK(memip_model_d(refined) == 2);
  CHECK(memip_model_k(refined) == selected);
  CHECK(memip_model_alpha(refined) == 1.0);

  memip_dataset_free(data);
  memip_dataset_free(data2);
  memip_model_free(model);
  memip_model_free(explicit_model);
  memip_model_free(model2);
  memip_model_free(refined);
  memip_truth_free(truth);
  memip_truth_free(truth2);
  memip_fit_result_free(fit);
  // Freeing NULL is documented as a no-op.
  memip_dataset_free(nullptr);
  memip_model_free(nullptr);
  memip_truth_free(nullptr);
  memip_fit_result_free(nullptr);
}

TEST_CASE("poisson scenario event counts are near rate * window * types") {
  memip_sim_config cfg;
  memip_sim_config_init(&cfg);
  std::strcpy(cfg.scenario, "poisson");
  cfg.d = 1;
  cfg.t_plus = 10.0;
  cfg.n_realizations = 50;
  cfg.seed = 5;
  memip_dataset* data = nullptr;
  // out_truth is optional.
  REQUIRE(memip_simulate(&cfg, 0, &data, nullptr) == MEMIP_OK);
  const long long n = memip_dataset_events(data);
  // Poisson(500): 350..650 is far beyond six standard deviations.
  CHECK(n > 350);
  CHECK(n < 650);
  memip_dataset_free(data);
}

TEST_CASE("AUC worked example and degenerate inputs") {
  const int labels[4] = {0, 0, 1, 1};
  const double scores[4] = {1.0, 2.0, 3.0, 2.0};
  double auc = 0.0;
  REQUIRE(memip_auc(labels, scores, 4, &auc) == MEMIP_OK);
  // Pairs: (1,3) (1,2) (2,3) win, (2,2) ties -> (3 + 0.5) / 4.
  CHECK(auc == doctest::Approx(0.875).epsilon(1e-15));

  const int ones[2] = {1, 1};
  const double s2[2] = {0.5, 0.25};
  CHECK(memip_auc(ones, s2, 2, &auc) == MEMIP_ERR_CONFIG);
  CHECK(!std::string(memip_last_error()).empty());
  CHECK(memip_auc(labels, scores, 0, &auc) == MEMIP_ERR_CONFIG);
  CHECK(memip_auc(nullptr, scores, 4, &auc) == MEMIP_ERR_CONFIG);
}

TEST_CASE("config hash matches the FNV-1a pins") {
  char hash[17];
  memip_config_hash("hello", hash);
  CHECK(std::string(hash) == "a430d84680aabd0b");
  memip_config_hash("", hash);
  CHECK(std::string(hash) == "cbf29ce484222325");
}

TEST_CASE("exponential-sum projection of a linear ramp") {
  // f(t) = 0.7 * (1 - t/10) + 0.1 sampled densely on [0, 10].
  constexpr int n = 401;
  std::vector<double> ts(n), fs(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = 10.0 * i / (n - 1);
    fs[i] = 0.7 * (1.0 - ts[i] / 10.0) + 0.1;
  }
  const auto sup_error = [&](const std::vector<double>& coef, int k) {
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = memip_exp_sum_value(coef.data(), k, 0.25, ts[i]);
      err = std::max(err, std::abs(v - fs[i]));
    }
    return err;
  };

  std::vector<double> coef5(6), coef12(13);
  REQUIRE(memip_exp_sum_approx(ts.data(), fs.data(), n, 5, 0.25, 10.0,
                               coef5.data()) == MEMIP_OK);
  REQUIRE(memip_exp_sum_approx(ts.data(), fs.data(), n, 12, 0.25, 10.0,
                               coef12.data()) == MEMIP_OK);
  const double err5 = sup_error(coef5, 5);
  const double err12 = sup_error(coef12, 12);
  CHECK(err5 < 1e-3);
  CHECK(err12 < 2e-4);  // measured ~8.4e-5; more terms must not hurt much
  CHECK(err12 < err5);

  // value() at t=0 is just the coefficient sum.
  double sum = 0.0;
  for (double ck : coef5) sum += ck;
  CHECK(memip_exp_sum_value(coef5.data(), 5, 0.25, 0.0) ==
        doctest::Approx(sum).epsilon(1e-12));
  CHECK(std::isnan(memip_exp_sum_value(nullptr, 5, 0.25, 0.0)));

  // Rejections: non-increasing times, not covering [0, t_max], K out of
  // the supported range, too few samples.
  std::vector<double> bad = ts;
  bad[5] = bad[4];
  CHECK(memip_exp_sum_approx(bad.data(), fs.data(), n, 5, 0.25, 10.0,
                             coef5.data()) == MEMIP_ERR_CONFIG);
  CHECK(memip_exp_sum_approx(ts.data() + 1, fs.data() + 1, n - 1, 5, 0.25,
                             10.0, coef5.data()) == MEMIP_ERR_CONFIG);
  CHECK(memip_exp_sum_approx(ts.data(), fs.data(), n, 0, 0.25, 10.0,
                             coef5.data()) == MEMIP_ERR_CONFIG);
  CHECK(memip_exp_sum_approx(ts.data(), fs.data(), n, 31, 0.25, 10.0,
                             coef5.data()) == MEMIP_ERR_CONFIG);
  CHECK(memip_exp_sum_approx(ts.data(), fs.data(), 1, 5, 0.25, 10.0,
                             coef5.data()) == MEMIP_ERR_CONFIG);
  CHECK(memip_exp_sum_approx(nullptr, fs.data(), n, 5, 0.25, 10.0,
                             coef5.data()) == MEMIP_ERR_CONFIG);
}

TEST_CASE("option initializers fill the documented defaults") {
  memip_fit_options fopt;
  memip_fit_options_init(&fopt);
  CHECK(fopt.holdout_fraction == 0.2);
  CHECK(fopt.nonneg_warm_start == 0);
  CHECK(fopt.max_newton_iters == 0);
  CHECK(fopt.grad_tol == 0.0);
  CHECK(fopt.threads == 0);
  memip_fit_options_init(nullptr);

  memip_reproduce_options ropt;
  memip_reproduce_options_init(&ropt);
  CHECK(ropt.seeds == 10);
  CHECK(ropt.base_seed == 1);
  CHECK(ropt.n_realizations == 0);
  CHECK(ropt.k_max == 0);
  CHECK(ropt.holdout_fraction == 0.2);
  CHECK(ropt.threads == 0);
  CHECK(ropt.alphas == nullptr);
  CHECK(ropt.n_alphas == 0);
  memip_reproduce_options_init(nullptr);
}

TEST_CASE("status codes match the failure class") {
  memip_dataset* data = nullptr;
  CHECK(memip_dataset_load(scratch_path("absent.events").c_str(), &data) ==
        MEMIP_ERR_IO);
  CHECK(data == nullptr);
  CHECK(!std::string(memip_last_error()).empty());
  CHECK(memip_dataset_load(nullptr, &data) == MEMIP_ERR_CONFIG);

  memip_model* model = nullptr;
  CHECK(memip_model_load(scratch_path("absent.model").c_str(), &model) ==
        MEMIP_ERR_IO);
  memip_truth* truth = nullptr;
  CHECK(memip_truth_load(scratch_path("absent.truth").c_str(), &truth) ==
        MEMIP_ERR_IO);

  memip_sim_config cfg;
  memip_sim_config_init(&cfg);
  std::strcpy(cfg.scenario, "bogus");
  CHECK(memip_simulate(&cfg, 1, &data, nullptr) == MEMIP_ERR_CONFIG);
  memip_sim_config_init(&cfg);
  cfg.t_plus = cfg.t_minus;  // empty window
  CHECK(memip_simulate(&cfg, 1, &data, nullptr) == MEMIP_ERR_CONFIG);
  CHECK(memip_simulate(nullptr, 1, &data, nullptr) == MEMIP_ERR_CONFIG);

  // Writing into a directory that does not exist is an I/O failure.
  memip_sim_config_init(&cfg);
  CHECK(memip_sim_config_save(&cfg, "/no-such-dir/sim.cfg") == MEMIP_ERR_IO);
}

TEST_CASE("miniature toy study runs end to end through the C surface") {
  const std::string out_dir = scratch_path("toy_rep");
  std::filesystem::remove_all(out_dir);

  memip_reproduce_options opt;
  memip_reproduce_options_init(&opt);
  opt.seeds = 3;
  opt.n_realizations = 400;
  opt.k_max = 2;
  opt.threads = 1;
  REQUIRE(memip_reproduce("toy", out_dir.c_str(), &opt) == MEMIP_OK);

  CHECK(std::filesystem::exists(out_dir + "/summary.txt"));
  CHECK(std::filesystem::exists(out_dir + "/kernel_integrals.csv"));
  CHECK(std::filesystem::exists(out_dir + "/curves_seed1.csv"));
  const std::string metrics = slurp(out_dir + "/metrics.csv");
  CHECK(metrics.rfind("metric,value,config_hash,seed", 0) == 0);

  CHECK(memip_reproduce("nonsense", out_dir.c_str(), &opt) ==
        MEMIP_ERR_CONFIG);
  CHECK(memip_reproduce(nullptr, out_dir.c_str(), &opt) == MEMIP_ERR_CONFIG);
}
