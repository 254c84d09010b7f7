// Damped Newton maximization with backtracking (Armijo) line search for
// smooth concave objectives.  The objective reports -infinity outside its
// domain, which the line search treats as "step too long"; the solver never
// evaluates gradients there.
#pragma once

#include <Eigen/Dense>

#include "memip/types.hpp"

namespace memip {

struct NewtonObjective {
  virtual ~NewtonObjective() = default;
  [[nodiscard]] virtual int dim() const = 0;
  // Concave objective value; -infinity signals an infeasible point.
  [[nodiscard]] virtual double value(const Eigen::VectorXd& x) const = 0;
  // Gradient and Hessian at a feasible point.
  virtual void grad_hess(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                         Eigen::MatrixXd& hess) const = 0;
};

struct NewtonParams {
  double armijo_c1{0.25};
  double backtrack_beta{0.5};
  double grad_tol{1e-8};
  double decrement_tol{1e-10};  // stop when decrement^2 / 2 <= this
  int max_iters{200};
  double ridge{1e-10};  // added to -H when the plain solve is unusable
};

struct NewtonResult {
  Eigen::VectorXd x;
  double objective{0.0};
  int iterations{0};        // accepted steps
  double grad_norm{0.0};
  bool converged{false};
  bool used_ridge{false};
  bool line_search_failed{false};
  bool stalled{false};       // consecutive accepted steps gained ~nothing
  int ascent_violations{0};  // accepted steps that failed to increase f
};

// Maximizes the objective from a feasible start; throws numeric_error if the
// start is infeasible.
NewtonResult newton_argmax(const NewtonObjective& objective,
                           const Eigen::VectorXd& start,
                           const NewtonParams& params = {});

}  // namespace memip
