#include "memip/newton.hpp"

#include <cmath>
#include <limits>

namespace memip {

NewtonResult newton_argmax(const NewtonObjective& objective,
                           const Eigen::VectorXd& start,
                           const NewtonParams& params) {
  const int n = objective.dim();
  if (start.size() != n) {
    throw config_error("newton: starting point has wrong dimension");
  }

  NewtonResult res;
  res.x = start;
  res.objective = objective.value(res.x);
  if (!std::isfinite(res.objective)) {
    throw numeric_error("newton: starting point is infeasible");
  }

  Eigen::VectorXd grad(n), step(n);
  Eigen::MatrixXd hess(n, n);
  int stall_count = 0;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    objective.grad_hess(res.x, grad, hess);
    res.grad_norm = grad.norm();
    if (!std::isfinite(res.grad_norm)) {
      throw numeric_error("newton: gradient is not finite");
    }
    if (res.grad_norm <= params.grad_tol) {
      res.converged = true;
      return res;
    }

    // Solve (-H) step = grad; -H is PSD by concavity.  Fall back to a tiny
    // ridge when the factorization is unusable (singular or indefinite from
    // rounding), and to plain gradient ascent as a last resort.
    Eigen::MatrixXd neg_h = -hess;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_h);
    bool ok = ldlt.info() == Eigen::Success;
    double descent = 0.0;  // g . step, the Newton decrement squared
    if (ok) {
      step = ldlt.solve(grad);
      const double residual = (neg_h * step - grad).norm();
      descent = grad.dot(step);
      ok = step.allFinite() && descent > 0.0 &&
           residual <= 1e-8 * (1.0 + res.grad_norm);
    }
    if (!ok) {
      res.used_ridge = true;
      neg_h.diagonal().array() += params.ridge;
      Eigen::LDLT<Eigen::MatrixXd> ridged(neg_h);
      step = ridged.solve(grad);
      descent = grad.dot(step);
      if (ridged.info() != Eigen::Success || !step.allFinite() ||
          !(descent > 0.0)) {
        step = grad;
        descent = res.grad_norm * res.grad_norm;
      }
    }

    if (0.5 * descent <= params.decrement_tol) {
      res.converged = true;
      return res;
    }

    // Backtracking line search on the ascent condition
    //   f(x + t*step) >= f(x) + c1 * t * (g . step).
    double t = 1.0;
    double candidate_value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd candidate;
    bool accepted = false;
    while (t > 1e-20) {
      candidate = res.x + t * step;
      candidate_value = objective.value(candidate);
      if (std::isfinite(candidate_value) &&
          candidate_value >= res.objective + params.armijo_c1 * t * descent) {
        accepted = true;
        break;
      }
      t *= params.backtrack_beta;
    }
    if (!accepted) {
      res.line_search_failed = true;
      return res;
    }
    if (candidate_value < res.objective) ++res.ascent_violations;
    const double gain = candidate_value - res.objective;
    res.x.swap(candidate);
    res.objective = candidate_value;
    ++res.iterations;

    // When accepted steps stop producing measurable gain while the decrement
    // stays large, the objective is exhausted in double precision (typically
    // a line search pinned against the domain boundary); stop rather than
    // burn the iteration budget.
    if (gain <= 1e-12 * (1.0 + std::abs(res.objective))) {
      if (++stall_count >= 2) {
        res.stalled = true;
        break;
      }
    } else {
      stall_count = 0;
    }
  }

  // Iteration cap reached; report the final gradient norm.
  objective.grad_hess(res.x, grad, hess);
  res.grad_norm = grad.norm();
  return res;
}

}  // namespace memip
