#include "memip/likelihood.hpp"

#include <cmath>
#include <string>

namespace memip {

namespace {

void check_compatible(const ExpSumModel& model, int d, int K, double alpha,
                      const char* what) {
  if (model.d != d || model.K > K || model.alpha != alpha) {
    throw config_error(std::string(what) +
                       ": model and features disagree on d/K/alpha");
  }
}

// Dot product of a feature row with a model block over the leading
// (d+1)*k_order coordinates (both are k-major, so a smaller basis is a
// prefix).
double prefix_dot(const double* row, const double* x, int n) {
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += row[j] * x[j];
  return acc;
}

std::string describe_event(const FeatureSet& fs, std::size_t row) {
  const auto& ref = fs.event_refs[row];
  const std::string id = ref.realization < fs.realization_ids.size()
                             ? fs.realization_ids[ref.realization]
                             : std::to_string(ref.realization);
  return "realization '" + id + "', event " + std::to_string(ref.index) +
         " at t=" + std::to_string(ref.time);
}

}  // namespace

double intensity(const ExpSumModel& model, const Realization& history, double t,
                 int u) {
  model.validate();
  if (u < 1 || u > model.d) {
    throw config_error("intensity: target type out of range");
  }
  double rate = 0.0;
  for (int k = model.K; k >= 1; --k) {
    rate += model.at(u, 0, k) * std::exp(-(k - 1) * model.alpha * t);
  }
  for (const auto& e : history.events) {
    if (!(e.time < t)) break;  // events sorted; strict past only
    const double lag = t - e.time;
    for (int k = model.K; k >= 1; --k) {
      rate += model.at(u, e.type, k) * std::exp(-k * model.alpha * lag);
    }
  }
  return std::max(rate, 0.0);
}

Eigen::VectorXd bhat_vector(const FeatureSet& fs) {
  return Eigen::Map<const Eigen::VectorXd>(
      fs.bhat.data(), static_cast<Eigen::Index>(fs.bhat.size()));
}

Eigen::Map<const Eigen::VectorXd> row_map(const FeatureSet& fs, std::size_t r) {
  return {fs.row(r), fs.block_dim()};
}

std::string first_infeasible_event(const FeatureSet& fs, int v,
                                   const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const std::size_t begin = fs.target_offset[static_cast<std::size_t>(v)];
  const std::size_t end = fs.target_offset[static_cast<std::size_t>(v) + 1];
  for (std::size_t r = begin; r < end; ++r) {
    const double rate = prefix_dot(fs.row(r), x.data(), n);
    if (!(rate > 0.0) || !std::isfinite(rate)) return describe_event(fs, r);
  }
  return {};
}

double relaxed_value_target(const FeatureSet& fs, int v,
                            const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  if (n < fs.d + 1 || n > fs.block_dim() || n % (fs.d + 1) != 0) {
    throw config_error("likelihood: block dimension mismatch");
  }
  if (x.lpNorm<Eigen::Infinity>() > kCoefBound) return kInfeasible;
  double value = 0.0;
  const std::size_t begin = fs.target_offset[static_cast<std::size_t>(v)];
  const std::size_t end = fs.target_offset[static_cast<std::size_t>(v) + 1];
  for (std::size_t r = begin; r < end; ++r) {
    const double rate = prefix_dot(fs.row(r), x.data(), n);
    if (!(rate > 0.0) || !std::isfinite(rate)) return kInfeasible;
    value += std::log(rate);
  }
  for (int j = 0; j < n; ++j) value -= fs.bhat[static_cast<std::size_t>(j)] * x[j];
  return value;
}

double relaxed_loglik(const ExpSumModel& model, const FeatureSet& fs) {
  check_compatible(model, fs.d, fs.K, fs.alpha, "relaxed_loglik");
  double total = 0.0;
  for (int v = 1; v <= fs.d; ++v) {
    const std::vector<double> block = model.target_block(v);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
        block.data(), static_cast<Eigen::Index>(block.size()));
    const double part = relaxed_value_target(fs, v, x);
    if (part == kInfeasible) return kInfeasible;
    total += part;
  }
  return total;
}

void relaxed_grad_hess_target(const FeatureSet& fs, int v,
                              const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                              Eigen::MatrixXd& hess) {
  const int n = static_cast<int>(x.size());
  if (n < fs.d + 1 || n > fs.block_dim() || n % (fs.d + 1) != 0) {
    throw config_error("likelihood: block dimension mismatch");
  }
  grad.resize(n);
  for (int j = 0; j < n; ++j) grad[j] = -fs.bhat[static_cast<std::size_t>(j)];
  hess = Eigen::MatrixXd::Zero(n, n);

  const std::size_t begin = fs.target_offset[static_cast<std::size_t>(v)];
  const std::size_t end = fs.target_offset[static_cast<std::size_t>(v) + 1];
  Eigen::VectorXd row_prefix(n);
  for (std::size_t r = begin; r < end; ++r) {
    const double* row = fs.row(r);
    const double rate = prefix_dot(row, x.data(), n);
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw numeric_error("gradient requested at an infeasible point: "
                          "non-positive predicted rate for " +
                          describe_event(fs, r));
    }
    const double w = 1.0 / rate;
    row_prefix = Eigen::Map<const Eigen::VectorXd>(row, n);
    grad.noalias() += w * row_prefix;
    hess.selfadjointView<Eigen::Lower>().rankUpdate(row_prefix, -w * w);
  }
  hess.triangularView<Eigen::StrictlyUpper>() =
      hess.triangularView<Eigen::StrictlyLower>().transpose();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> relaxed_grad_hess(
    const ExpSumModel& model, const FeatureSet& fs, int v) {
  check_compatible(model, fs.d, fs.K, fs.alpha, "relaxed_grad_hess");
  if (v < 1 || v > fs.d) throw config_error("relaxed_grad_hess: bad target");
  const std::vector<double> block = model.target_block(v);
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
      block.data(), static_cast<Eigen::Index>(block.size()));
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> out;
  relaxed_grad_hess_target(fs, v, x, out.first, out.second);
  return out;
}

double exact_loglik(const ExpSumModel& model, const GridFeatures& gf,
                    const FeatureSet& fs) {
  check_compatible(model, fs.d, fs.K, fs.alpha, "exact_loglik");
  check_compatible(model, gf.d, gf.K, gf.alpha, "exact_loglik");

  const double relaxed = relaxed_loglik(model, fs);
  if (relaxed == kInfeasible) return kInfeasible;

  // Rectangle-rule sum of the clip correction (-B(s) . x)_+ >= 0.  Using the
  // closed-form Bhat for the linear part keeps exact <= relaxed exactly.
  const int n = model.K * (model.d + 1);
  std::vector<Eigen::VectorXd> blocks;
  blocks.reserve(static_cast<std::size_t>(model.d));
  for (int v = 1; v <= model.d; ++v) {
    const std::vector<double> block = model.target_block(v);
    blocks.emplace_back(Eigen::Map<const Eigen::VectorXd>(
        block.data(), static_cast<Eigen::Index>(block.size())));
  }

  double correction = 0.0;
  for (const auto& grid : gf.grids) {
    for (std::size_t m = 0; m + 1 < grid.times.size(); ++m) {
      const double width = grid.times[m + 1] - grid.times[m];
      if (width <= 0.0) continue;
      const double* row = grid.b.data() + m * static_cast<std::size_t>(gf.block_dim());
      for (int v = 1; v <= model.d; ++v) {
        const double rate = prefix_dot(row, blocks[static_cast<std::size_t>(v - 1)].data(), n);
        if (rate < 0.0) correction += -rate * width;
      }
    }
  }
  return relaxed - correction;
}

}  // namespace memip
