/* C interface to the Hawkes-process learning library.
 *
 * Everything behind this header is implemented in C++ and shipped as the
 * shared library `memip`; the CLI and any external embedder link only this
 * surface.  All functions are thread-safe as long as a given handle is not
 * used from two threads at once.
 *
 * Conventions:
 *   - Every fallible call returns a memip_status; on failure a human-readable
 *     message is stored per thread and readable via memip_last_error().
 *   - Handles own their objects and are released with the matching _free();
 *     freeing NULL is a no-op.  Output handle pointers are written only on
 *     MEMIP_OK.
 *   - Event types are 1-based; source index 0 denotes the background
 *     component.  Model coefficient (v, u, k) is the weight of
 *     exp(-k*alpha*lag) in the kernel from source u onto target v (for
 *     u >= 1), or of exp(-(k-1)*alpha*t) in target v's background (u = 0).
 */
#ifndef MEMIP_H
#define MEMIP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the CLI uses them verbatim as exit codes. */
typedef enum memip_status {
  MEMIP_OK = 0,
  MEMIP_ERR_CONFIG = 2,  /* invalid arguments, malformed schema */
  MEMIP_ERR_NUMERIC = 3, /* infeasible start, divergent integral, ... */
  MEMIP_ERR_IO = 4       /* unreadable or unwritable file */
} memip_status;

/* Message for the most recent failure in the calling thread.  Never NULL;
 * empty string when no failure has occurred.  Valid until the next failing
 * call from the same thread. */
const char* memip_last_error(void);

/* Library version, "major.minor.patch". */
const char* memip_version(void);

/* ---------------------------------------------------------------- handles */

typedef struct memip_dataset memip_dataset;       /* event realizations */
typedef struct memip_model memip_model;           /* exponential-sum model */
typedef struct memip_truth memip_truth;           /* closed-form ground truth */
typedef struct memip_fit_result memip_fit_result; /* fitted chain + report */

void memip_dataset_free(memip_dataset* data);
void memip_model_free(memip_model* model);
void memip_truth_free(memip_truth* truth);
void memip_fit_result_free(memip_fit_result* result);

/* ----------------------------------------------------------------- events */

memip_status memip_dataset_load(const char* path, memip_dataset** out);
memip_status memip_dataset_save(const memip_dataset* data, const char* path);
int memip_dataset_d(const memip_dataset* data);
long long memip_dataset_realizations(const memip_dataset* data);
long long memip_dataset_events(const memip_dataset* data);

/* ----------------------------------------------------------------- models */

memip_status memip_model_load(const char* path, memip_model** out);
memip_status memip_model_save(const memip_model* model, const char* path);
int memip_model_d(const memip_model* model);
int memip_model_k(const memip_model* model);
double memip_model_alpha(const memip_model* model);
/* Coefficient at target v in [1,d], source u in [0,d], basis k in [1,K]. */
memip_status memip_model_coef(const memip_model* model, int v, int u, int k,
                              double* out);
/* Fitted background (u = 0) or kernel (u >= 1) of target v evaluated at lag
 * t, and its integral over [0, t_max]. */
memip_status memip_model_value(const memip_model* model, int v, int u,
                               double t, double* out);
memip_status memip_model_integral(const memip_model* model, int v, int u,
                                  double t_max, double* out);

memip_status memip_truth_load(const char* path, memip_truth** out);
memip_status memip_truth_save(const memip_truth* truth, const char* path);
int memip_truth_d(const memip_truth* truth);

/* Spectral radius of the branching matrix (entry (v,u) = integral of
 * |kernel_vu|); < 1 means the process is stable. */
memip_status memip_truth_spectral_radius(const memip_truth* truth,
                                         double* out);
memip_status memip_model_spectral_radius(const memip_model* model,
                                         double* out);

/* ------------------------------------------------------------- simulation */

typedef struct memip_sim_config {
  char scenario[16];        /* "large" | "toy" | "poisson" | "expsum" */
  int d;                    /* number of event types */
  double p;                 /* probability a kernel is excitatory (large) */
  double t_minus;           /* observation window start */
  double t_plus;            /* observation window end */
  long long n_realizations; /* independent windows to sample */
  uint64_t seed;            /* base RNG seed; realization i uses stream i */
  double mu;                /* poisson scenario: constant rate per type */
  double mu_max;            /* large scenario: backgrounds ~ U[0, mu_max] */
} memip_sim_config;

/* Fills in the documented defaults (large scenario, d=2, window [0,20],
 * one realization, seed 1, mu=1, mu_max=0.001). */
void memip_sim_config_init(memip_sim_config* config);
/* Parses a "key value" config file into *config; missing keys take the
 * documented defaults. */
memip_status memip_sim_config_load(const char* path,
                                   memip_sim_config* config);
memip_status memip_sim_config_save(const memip_sim_config* config,
                                   const char* path);

/* Samples config->n_realizations windows by Ogata modified thinning.
 * out_truth (optional) receives the generating model for later scoring.
 * Deterministic for a fixed config, any thread count. */
memip_status memip_simulate(const memip_sim_config* config, int threads,
                            memip_dataset** out_data,
                            memip_truth** out_truth);

/* -------------------------------------------------------------- learning */

typedef struct memip_fit_options {
  double holdout_fraction; /* validation slice for selecting K; 0 = none */
  int nonneg_warm_start;   /* also try a non-negative start, keep the better */
  int max_newton_iters;    /* <= 0 keeps the default (200) */
  double grad_tol;         /* <= 0 keeps the default (1e-8) */
  int threads;             /* 0 = HAWKES_THREADS env, then hardware */
} memip_fit_options;

void memip_fit_options_init(memip_fit_options* options);

/* Fits the whole chain K = 1..k_max at decay unit alpha, selecting K on the
 * hold-out slice when holdout_fraction > 0.  w1 (optional) is a K=1 model
 * used as the k=1 starting point; it must be feasible on the data. */
memip_status memip_fit(const memip_dataset* data, double alpha, int k_max,
                       const memip_fit_options* options,
                       const memip_model* w1, memip_fit_result** out);

int memip_fit_result_k_max(const memip_fit_result* result);
/* 0 when no hold-out selection was performed. */
int memip_fit_result_selected_k(const memip_fit_result* result);
/* Copy of the order-k model; k = 0 means the selected one (the largest
 * fitted order when no selection ran). */
memip_status memip_fit_result_model(const memip_fit_result* result, int k,
                                    memip_model** out);
/* Per-k objective/iteration/validation report as a "key value" text file. */
memip_status memip_fit_result_save_report(const memip_fit_result* result,
                                          const char* path);

/* Supergradient ascent on the exact (clipped) objective starting from a
 * fitted model; dt is the compensator grid step. */
memip_status memip_exact_refine(const memip_model* model,
                                const memip_dataset* data, double dt,
                                int iterations, memip_model** out);

/* ------------------------------------------------------------- evaluation */

/* Mann-Whitney AUC of binary labels against scores; both classes required. */
memip_status memip_auc(const int* labels, const double* scores, size_t n,
                       double* out);

/* Normalized L2 distance between true and fitted kernels (diff) or
 * backgrounds, averaged over type pairs; in [0, 2]. */
memip_status memip_diff_score(const memip_truth* truth,
                              const memip_model* fitted, double t_max,
                              int grid_points, double* out);
memip_status memip_background_diff_score(const memip_truth* truth,
                                         const memip_model* fitted,
                                         double t_max, int grid_points,
                                         double* out);

/* Type-prediction score on held-out events: with a truth, the excess-AUC
 * ratio (1 when the model reproduces the truth's probabilities); without,
 * the plain average AUC over usable types.  types_kept and uniform_fallbacks
 * (optional) receive the number of types carrying both classes and the
 * number of events scored uniformly because every intensity was zero. */
memip_status memip_pred_score(const memip_model* model,
                              const memip_dataset* test,
                              const memip_truth* truth, int threads,
                              double* out, int* types_kept,
                              int* uniform_fallbacks);

/* FNV-1a digest of a configuration string: 16 hex characters + NUL into
 * out[17].  Used to tag metric CSV rows. */
void memip_config_hash(const char* text, char out[17]);

/* ------------------------------------------------------- basis projection */

/* Projects a tabulated function onto the exponential basis
 * {exp(-k*alpha*t)}: returns K+1 coefficients c_0..c_K with
 * f(t) ~ sum_k c_k exp(-k*alpha*t) on [0, t_max].  The samples (t[i], f[i])
 * must have strictly increasing t covering [0, t_max]; values between
 * samples are linearly interpolated. */
memip_status memip_exp_sum_approx(const double* t, const double* f, size_t n,
                                  int k, double alpha, double t_max,
                                  double* coefficients);
/* Value of such an approximant at t. */
double memip_exp_sum_value(const double* coefficients, int k, double alpha,
                           double t);

/* ------------------------------------------------------------ experiments */

typedef struct memip_reproduce_options {
  int seeds;                /* independent repetitions (default 10) */
  uint64_t base_seed;       /* seed of repetition 1 */
  long long n_realizations; /* 0 = the study's default scale */
  int k_max;                /* 0 = the study's default */
  double holdout_fraction;  /* for selecting K (default 0.2) */
  int threads;
  const double* alphas;     /* scaled studies: candidate decay units */
  size_t n_alphas;          /* 0 = default {0.1, 1, 10} */
} memip_reproduce_options;

void memip_reproduce_options_init(memip_reproduce_options* options);

/* Runs one synthetic study ("toy", "scaled1", or "scaled2") end to end —
 * simulate, fit MEMIP and the single-exponential baseline, evaluate — and
 * writes the CSV/summary bundle into out_dir. */
memip_status memip_reproduce(const char* study, const char* out_dir,
                             const memip_reproduce_options* options);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MEMIP_H */
