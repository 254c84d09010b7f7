// Core value types shared across the library: event streams, the
// exponential-sum model parameterization, and ground-truth process
// descriptions used by the simulator and the evaluation metrics.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace memip {

// Error taxonomy.  These map 1:1 onto the C API / CLI status codes:
// config_error -> 2, numeric_error -> 3, io_error -> 4.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One point of a marked point process.  Types are 1-based; index 0 is
// reserved everywhere for the background component.
struct Event {
  double time{0.0};
  int type{0};
};

// A single observation window [t_minus, t_plus] with its events sorted by
// time (ties allowed, kept in input order).
struct Realization {
  std::string id;
  double t_minus{0.0};
  double t_plus{0.0};
  std::vector<Event> events;

  [[nodiscard]] std::size_t size() const { return events.size(); }
  [[nodiscard]] double window() const { return t_plus - t_minus; }

  // Throws config_error when the invariants do not hold: finite window with
  // t_minus < t_plus, event times non-decreasing and strictly inside the
  // window, event types in [1, d].
  void validate(int d) const;
};

// A collection of independent realizations of one d-variate process.
struct Dataset {
  int d{0};
  std::vector<Realization> realizations;

  [[nodiscard]] std::size_t total_events() const;
  [[nodiscard]] double total_window() const;
  [[nodiscard]] double max_t_plus() const;
  // counts[v] = number of events of type v, for v in [1, d]; counts[0] = 0.
  [[nodiscard]] std::vector<std::size_t> counts_by_type() const;

  void validate() const;
};

// Flat indexing of one target's parameter block.  Coordinates are k-major:
// idx(u, k) = (k-1)*(d+1) + u, with u = 0 the background and u in [1, d]
// the source types.  This makes the order-k sub-block a contiguous prefix,
// so growing the basis is literally zero-padding.
struct ParamLayout {
  int d{0};
  int K{0};

  [[nodiscard]] int block_dim() const { return (d + 1) * K; }
  [[nodiscard]] int idx(int u, int k) const { return (k - 1) * (d + 1) + u; }
};

// Exponential-sum process model: for target v,
//   mu_v(t)    = sum_{k=1..K} X[v][0][k] * exp(-(k-1)*alpha*t)   (t global)
//   g_{vu}(s)  = sum_{k=1..K} X[v][u][k] * exp(-k*alpha*s)        (s = lag)
// and the event intensity is the positive part of background plus the sum
// of kernel contributions over the strict past.  Coefficients may have any
// sign; positivity is enforced only through the clipped intensity.
struct ExpSumModel {
  int d{0};
  int K{0};
  double alpha{1.0};
  // coef[(v-1)*(d+1)*K + u*K + (k-1)], i.e. [v][u][k] with v,k 1-based and
  // u in [0, d].
  std::vector<double> coef;

  ExpSumModel() = default;
  ExpSumModel(int d_, int K_, double alpha_);

  [[nodiscard]] double at(int v, int u, int k) const {
    return coef[flat(v, u, k)];
  }
  double& at(int v, int u, int k) { return coef[flat(v, u, k)]; }

  // k-major block of target v (ParamLayout order), as a plain vector.
  [[nodiscard]] std::vector<double> target_block(int v) const;
  void set_target_block(int v, const std::vector<double>& block);

  void validate() const;

 private:
  [[nodiscard]] std::size_t flat(int v, int u, int k) const;
};

// Parametric background descriptors for ground-truth processes.
//   Constant:    mu(t) = value
//   CosineDecay: mu(t) = (trig(2 pi t / omega) + 2) / (1 + t),
//                trig = sin when sine is set, else cos
//   ExpSum:      mu(t) = sum_k coef[k-1] * exp(-(k-1) alpha t)
struct Background {
  enum class Kind { Constant, CosineDecay, ExpSum };

  Kind kind{Kind::Constant};
  double value{0.0};     // Constant
  bool sine{false};      // CosineDecay
  double omega{1.0};     // CosineDecay
  double alpha{1.0};     // ExpSum
  std::vector<double> coef;  // ExpSum

  [[nodiscard]] double operator()(double t) const;
  // Non-increasing majorant: majorant(t) >= mu(s) for every s >= t >= 0.
  [[nodiscard]] double majorant(double t) const;

  void validate() const;
};

// Parametric kernel descriptors for ground-truth processes.
//   Zero:        g(s) = 0
//   SinPowerLaw: g(s) = nu * (sin(2 pi s / omega + phase) + 2) / (3 (1+s)^2)
//   ExpSum:      g(s) = sum_k coef[k-1] * exp(-k alpha s)
struct Kernel {
  enum class Kind { Zero, SinPowerLaw, ExpSum };

  Kind kind{Kind::Zero};
  double nu{0.0};        // SinPowerLaw
  double omega{1.0};     // SinPowerLaw
  double phase{0.0};     // SinPowerLaw
  double alpha{1.0};     // ExpSum
  std::vector<double> coef;  // ExpSum

  [[nodiscard]] double operator()(double s) const;
  // Non-increasing envelope: envelope(s) >= |g(x)| for every x >= s >= 0.
  [[nodiscard]] double envelope(double s) const;
  // Closed-form integral of the envelope over [s, infinity).
  [[nodiscard]] double envelope_tail(double s) const;

  void validate() const;
};

// Ground truth for synthetic experiments: explicit backgrounds and kernels.
// kernel(v, u) is the effect ON type v FROM past events of type u.
struct GroundTruthModel {
  int d{0};
  std::vector<Background> backgrounds;  // size d, entry v-1
  std::vector<Kernel> kernels;          // size d*d, entry (v-1)*d + (u-1)

  GroundTruthModel() = default;
  explicit GroundTruthModel(int d_);

  [[nodiscard]] const Kernel& kernel(int v, int u) const {
    return kernels[static_cast<std::size_t>(v - 1) * d + (u - 1)];
  }
  Kernel& kernel(int v, int u) {
    return kernels[static_cast<std::size_t>(v - 1) * d + (u - 1)];
  }
  [[nodiscard]] const Background& background(int v) const {
    return backgrounds[static_cast<std::size_t>(v - 1)];
  }
  Background& background(int v) {
    return backgrounds[static_cast<std::size_t>(v - 1)];
  }

  void validate() const;
};

// Uniform, non-owning view over either model family.  Gives the simulator
// and the metrics one evaluation interface: clipped-intensity processes
// need only per-component values plus domination envelopes.
class ProcessRef {
 public:
  explicit ProcessRef(const GroundTruthModel& m) : truth_(&m) {}
  explicit ProcessRef(const ExpSumModel& m) : expsum_(&m) {}

  [[nodiscard]] int dim() const;
  [[nodiscard]] double background(int v, double t) const;
  // Non-increasing in t; bounds background(v, s) for all s >= t.
  [[nodiscard]] double background_majorant(int v, double t) const;
  [[nodiscard]] double kernel(int v, int u, double s) const;
  // Non-increasing upper bound on the kernel value (one-sided): used to
  // dominate the clipped intensity, so negative parts may be dropped.
  [[nodiscard]] double kernel_upper(int v, int u, double s) const;
  // Non-increasing bound on |kernel|, and its tail integral: used for the
  // branching matrix.
  [[nodiscard]] double kernel_abs_envelope(int v, int u, double s) const;
  [[nodiscard]] double kernel_abs_envelope_tail(int v, int u, double s) const;

 private:
  const GroundTruthModel* truth_{nullptr};
  const ExpSumModel* expsum_{nullptr};
};

}  // namespace memip
