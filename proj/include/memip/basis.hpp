// Evaluation of fitted exponential-sum models and projection of arbitrary
// functions onto the exponential basis.  The projection interpolates the
// substituted function y |-> f(-ln(y)/alpha) at Chebyshev nodes of
// [exp(-alpha*T), 1], so composing the resulting polynomial with
// y = exp(-alpha*t) yields an exponential-sum approximant of f whose
// sup-norm error decays geometrically in K for analytic f.
#pragma once

#include <functional>
#include <vector>

#include "memip/types.hpp"

namespace memip {

// Value at lag t of target v's fitted background (u = 0) or of the fitted
// kernel from source u >= 1, per the block layout of ExpSumModel: background
// entries decay at (k-1)*alpha (the k=1 entry is the constant), kernel
// entries at k*alpha.
double reconstruct(const ExpSumModel& model, int v, int u, double t);

// Integral of the reconstruction over [0, T] (closed form).
double reconstruct_integral(const ExpSumModel& model, int v, int u, double T);

// Coefficients c_0..c_K of the polynomial interpolating
// y |-> f(-ln(y)/alpha) at the K+1 Chebyshev-Lobatto nodes of
// [exp(-alpha*T), 1]; then f(t) ~ sum_k c_k exp(-k*alpha*t) on [0, T].
// Degree-<=K integrands are reproduced exactly (so constants for any K and
// exp(-alpha*t) for K >= 1).  Node values and the expansion to monomial
// coefficients are carried in extended precision; K <= 30 keeps the
// expansion well conditioned.
std::vector<double> exp_sum_approx(const std::function<double(double)>& f,
                                   int K, double alpha, double T);

// Value at t of the approximant defined by exp_sum_approx coefficients.
double exp_sum_value(const std::vector<double>& coefficients, double alpha,
                     double t);

// max_{grid} |f(t) - approximant(t)| over n uniform points spanning [0, T].
double sup_error_on_grid(const std::function<double(double)>& f,
                         const std::vector<double>& coefficients, double alpha,
                         double T, int n);

}  // namespace memip
