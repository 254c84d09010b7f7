// Intensities and the two concave objectives.  The relaxed objective drops
// the positive-part clip inside the compensator integral, which makes it an
// upper bound on the exact (clipped) objective, separable per target type,
// and smooth on its domain; infeasibility (an event with non-positive
// predicted rate) is the value -infinity rather than an error so that line
// searches can probe freely.
#pragma once

#include <Eigen/Dense>
#include <limits>

#include "memip/features.hpp"
#include "memip/types.hpp"

namespace memip {

inline constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

// The relaxed objective can be unbounded: for a sparsely observed target
// there may be signed coefficient directions that keep every observed event
// rate positive while decreasing Bhat . x forever.  Such rays are statistical
// noise (model selection discards them), but an unconstrained maximizer would
// chase them indefinitely, so the domain is capped at a coefficient magnitude
// far beyond anything a meaningful rate model produces.  Points outside the
// cap count as infeasible.
inline constexpr double kCoefBound = 1e6;

// Clipped event rate (mu_u(t) + sum over strictly earlier events)_+ under an
// exponential-sum model, evaluated directly from the raw history.
double intensity(const ExpSumModel& model, const Realization& history, double t,
                 int u);

// Relaxed objective for the whole model:
//   sum_{events i} ln(A_i . x_{v_i}) - sum_v Bhat . x_v.
// Returns -infinity when any event rate is non-positive.
double relaxed_loglik(const ExpSumModel& model, const FeatureSet& fs);

// Per-target partial value on the leading (d+1)*k_order coordinates.
// x must have dimension (d+1)*k_order with k_order <= fs.K.
double relaxed_value_target(const FeatureSet& fs, int v,
                            const Eigen::VectorXd& x);

// Analytic gradient and Hessian of the per-target partial objective at a
// feasible point; throws numeric_error on an infeasible x, naming an
// offending event.
void relaxed_grad_hess_target(const FeatureSet& fs, int v,
                              const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                              Eigen::MatrixXd& hess);

// Convenience wrapper matching the model layout: gradient/Hessian of target
// v's block at the model's coefficients.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> relaxed_grad_hess(
    const ExpSumModel& model, const FeatureSet& fs, int v);

// Exact (clipped) objective.  The compensator integral is evaluated as the
// closed-form linear term Bhat . x plus a left-endpoint rectangle-rule sum
// of the clip correction (-B(s) . x)_+ over the grid; the correction is
// non-negative, so exact <= relaxed holds for every grid step.
double exact_loglik(const ExpSumModel& model, const GridFeatures& gf,
                    const FeatureSet& fs);

// Helpers shared with the fit layer.
Eigen::VectorXd bhat_vector(const FeatureSet& fs);
Eigen::Map<const Eigen::VectorXd> row_map(const FeatureSet& fs, std::size_t r);

// Empty string when x is feasible for target v; otherwise a description of
// the first event whose predicted rate is non-positive.
std::string first_infeasible_event(const FeatureSet& fs, int v,
                                   const Eigen::VectorXd& x);

}  // namespace memip
