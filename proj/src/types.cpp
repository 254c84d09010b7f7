#include "memip/types.hpp"

#include <algorithm>
#include <limits>

namespace memip {

namespace {

[[noreturn]] void fail_config(const std::string& msg) { throw config_error(msg); }

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void Realization::validate(int d) const {
  if (!finite(t_minus) || !finite(t_plus)) {
    fail_config("realization '" + id + "': window bounds must be finite");
  }
  if (!(t_minus < t_plus)) {
    fail_config("realization '" + id + "': requires t_minus < t_plus");
  }
  double prev = t_minus;
  bool first = true;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!finite(e.time)) {
      fail_config("realization '" + id + "': event " + std::to_string(i) +
                  " has non-finite time");
    }
    if (e.type < 1 || e.type > d) {
      fail_config("realization '" + id + "': event " + std::to_string(i) +
                  " has type " + std::to_string(e.type) +
                  " outside [1, " + std::to_string(d) + "]");
    }
    if (!(e.time >= t_minus) || !(e.time <= t_plus)) {
      fail_config("realization '" + id + "': event " + std::to_string(i) +
                  " lies outside the window");
    }
    if (!first && e.time < prev) {
      fail_config("realization '" + id + "': event times must be non-decreasing");
    }
    prev = e.time;
    first = false;
  }
}

std::size_t Dataset::total_events() const {
  std::size_t n = 0;
  for (const auto& r : realizations) n += r.size();
  return n;
}

double Dataset::total_window() const {
  double w = 0.0;
  for (const auto& r : realizations) w += r.window();
  return w;
}

double Dataset::max_t_plus() const {
  double m = 0.0;
  for (const auto& r : realizations) m = std::max(m, r.t_plus);
  return m;
}

std::vector<std::size_t> Dataset::counts_by_type() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(d) + 1, 0);
  for (const auto& r : realizations) {
    for (const auto& e : r.events) ++counts[static_cast<std::size_t>(e.type)];
  }
  return counts;
}

void Dataset::validate() const {
  if (d < 1) fail_config("dataset: dimension must be >= 1");
  std::vector<std::string> ids;
  ids.reserve(realizations.size());
  for (const auto& r : realizations) {
    r.validate(d);
    ids.push_back(r.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    fail_config("dataset: realization ids must be unique");
  }
}

ExpSumModel::ExpSumModel(int d_, int K_, double alpha_)
    : d(d_), K(K_), alpha(alpha_),
      coef(static_cast<std::size_t>(d_) * (d_ + 1) * K_, 0.0) {
  validate();
}

std::size_t ExpSumModel::flat(int v, int u, int k) const {
  return (static_cast<std::size_t>(v - 1) * (d + 1) + u) * K + (k - 1);
}

std::vector<double> ExpSumModel::target_block(int v) const {
  ParamLayout layout{d, K};
  std::vector<double> block(static_cast<std::size_t>(layout.block_dim()));
  for (int k = 1; k <= K; ++k) {
    for (int u = 0; u <= d; ++u) {
      block[static_cast<std::size_t>(layout.idx(u, k))] = at(v, u, k);
    }
  }
  return block;
}

void ExpSumModel::set_target_block(int v, const std::vector<double>& block) {
  ParamLayout layout{d, K};
  if (block.size() != static_cast<std::size_t>(layout.block_dim())) {
    fail_config("model: target block has wrong dimension");
  }
  for (int k = 1; k <= K; ++k) {
    for (int u = 0; u <= d; ++u) {
      at(v, u, k) = block[static_cast<std::size_t>(layout.idx(u, k))];
    }
  }
}

void ExpSumModel::validate() const {
  if (d < 1) fail_config("model: dimension must be >= 1");
  if (K < 1) fail_config("model: basis order must be >= 1");
  if (!finite(alpha) || alpha <= 0.0) fail_config("model: alpha must be positive");
  if (coef.size() != static_cast<std::size_t>(d) * (d + 1) * K) {
    fail_config("model: coefficient tensor has wrong size");
  }
  for (double c : coef) {
    if (!finite(c)) fail_config("model: coefficients must be finite");
  }
}

double Background::operator()(double t) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::CosineDecay: {
      const double arg = 2.0 * M_PI * t / omega;
      const double trig = sine ? std::sin(arg) : std::cos(arg);
      return (trig + 2.0) / (1.0 + t);
    }
    case Kind::ExpSum: {
      double s = 0.0;
      for (std::size_t k = coef.size(); k-- > 0;) {
        s += coef[k] * std::exp(-static_cast<double>(k) * alpha * t);
      }
      return s;
    }
  }
  return 0.0;
}

double Background::majorant(double t) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::CosineDecay:
      // (trig + 2) <= 3 and 1/(1+t) decreases.
      return 3.0 / (1.0 + t);
    case Kind::ExpSum: {
      // Constant term plus positive parts of the decaying ones.
      double s = 0.0;
      for (std::size_t k = 0; k < coef.size(); ++k) {
        const double part = k == 0 ? coef[k]
                                   : std::max(coef[k], 0.0) *
                                         std::exp(-static_cast<double>(k) * alpha * t);
        s += std::max(part, 0.0);
      }
      return s;
    }
  }
  return 0.0;
}

void Background::validate() const {
  switch (kind) {
    case Kind::Constant:
      if (!finite(value) || value < 0.0) {
        fail_config("background: constant rate must be finite and >= 0");
      }
      break;
    case Kind::CosineDecay:
      if (!finite(omega) || omega <= 0.0) {
        fail_config("background: omega must be positive");
      }
      break;
    case Kind::ExpSum: {
      if (coef.empty()) fail_config("background: empty coefficient list");
      if (!finite(alpha) || alpha <= 0.0) {
        fail_config("background: alpha must be positive");
      }
      for (double c : coef) {
        if (!finite(c)) fail_config("background: non-finite coefficient");
      }
      break;
    }
  }
}

double Kernel::operator()(double s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::SinPowerLaw: {
      const double osc = std::sin(2.0 * M_PI * s / omega + phase) + 2.0;
      return nu * osc / (3.0 * (1.0 + s) * (1.0 + s));
    }
    case Kind::ExpSum: {
      double v = 0.0;
      for (std::size_t k = coef.size(); k-- > 0;) {
        v += coef[k] * std::exp(-static_cast<double>(k + 1) * alpha * s);
      }
      return v;
    }
  }
  return 0.0;
}

double Kernel::envelope(double s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::SinPowerLaw:
      // |osc| <= 3, so |g| <= |nu| / (1+s)^2, which decreases.
      return std::abs(nu) / ((1.0 + s) * (1.0 + s));
    case Kind::ExpSum: {
      double v = 0.0;
      for (std::size_t k = 0; k < coef.size(); ++k) {
        v += std::abs(coef[k]) * std::exp(-static_cast<double>(k + 1) * alpha * s);
      }
      return v;
    }
  }
  return 0.0;
}

double Kernel::envelope_tail(double s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::SinPowerLaw:
      return std::abs(nu) / (1.0 + s);
    case Kind::ExpSum: {
      double v = 0.0;
      for (std::size_t k = 0; k < coef.size(); ++k) {
        const double rate = static_cast<double>(k + 1) * alpha;
        v += std::abs(coef[k]) * std::exp(-rate * s) / rate;
      }
      return v;
    }
  }
  return 0.0;
}

void Kernel::validate() const {
  switch (kind) {
    case Kind::Zero:
      break;
    case Kind::SinPowerLaw:
      if (!finite(nu)) fail_config("kernel: nu must be finite");
      if (!finite(omega) || omega <= 0.0) fail_config("kernel: omega must be positive");
      if (!finite(phase)) fail_config("kernel: phase must be finite");
      break;
    case Kind::ExpSum:
      if (coef.empty()) fail_config("kernel: empty coefficient list");
      if (!finite(alpha) || alpha <= 0.0) fail_config("kernel: alpha must be positive");
      for (double c : coef) {
        if (!finite(c)) fail_config("kernel: non-finite coefficient");
      }
      break;
  }
}

GroundTruthModel::GroundTruthModel(int d_)
    : d(d_),
      backgrounds(static_cast<std::size_t>(d_)),
      kernels(static_cast<std::size_t>(d_) * d_) {
  if (d < 1) fail_config("truth: dimension must be >= 1");
}

void GroundTruthModel::validate() const {
  if (d < 1) fail_config("truth: dimension must be >= 1");
  if (backgrounds.size() != static_cast<std::size_t>(d) ||
      kernels.size() != static_cast<std::size_t>(d) * d) {
    fail_config("truth: component counts do not match the dimension");
  }
  for (const auto& b : backgrounds) b.validate();
  for (const auto& k : kernels) k.validate();
}

int ProcessRef::dim() const { return truth_ ? truth_->d : expsum_->d; }

double ProcessRef::background(int v, double t) const {
  if (truth_) return truth_->background(v)(t);
  const ExpSumModel& m = *expsum_;
  double s = 0.0;
  for (int k = m.K; k >= 1; --k) {
    s += m.at(v, 0, k) * std::exp(-(k - 1) * m.alpha * t);
  }
  return s;
}

double ProcessRef::background_majorant(int v, double t) const {
  if (truth_) return truth_->background(v).majorant(t);
  const ExpSumModel& m = *expsum_;
  double s = std::max(m.at(v, 0, 1), 0.0);
  for (int k = 2; k <= m.K; ++k) {
    s += std::max(m.at(v, 0, k), 0.0) * std::exp(-(k - 1) * m.alpha * t);
  }
  return s;
}

double ProcessRef::kernel(int v, int u, double s) const {
  if (truth_) return truth_->kernel(v, u)(s);
  const ExpSumModel& m = *expsum_;
  double g = 0.0;
  for (int k = m.K; k >= 1; --k) {
    g += m.at(v, u, k) * std::exp(-k * m.alpha * s);
  }
  return g;
}

double ProcessRef::kernel_upper(int v, int u, double s) const {
  if (truth_) return truth_->kernel(v, u).envelope(s);
  const ExpSumModel& m = *expsum_;
  double g = 0.0;
  for (int k = 1; k <= m.K; ++k) {
    g += std::max(m.at(v, u, k), 0.0) * std::exp(-k * m.alpha * s);
  }
  return g;
}

double ProcessRef::kernel_abs_envelope(int v, int u, double s) const {
  if (truth_) return truth_->kernel(v, u).envelope(s);
  const ExpSumModel& m = *expsum_;
  double g = 0.0;
  for (int k = 1; k <= m.K; ++k) {
    g += std::abs(m.at(v, u, k)) * std::exp(-k * m.alpha * s);
  }
  return g;
}

double ProcessRef::kernel_abs_envelope_tail(int v, int u, double s) const {
  if (truth_) return truth_->kernel(v, u).envelope_tail(s);
  const ExpSumModel& m = *expsum_;
  double g = 0.0;
  for (int k = 1; k <= m.K; ++k) {
    const double rate = k * m.alpha;
    g += std::abs(m.at(v, u, k)) * std::exp(-rate * s) / rate;
  }
  return g;
}

}  // namespace memip
