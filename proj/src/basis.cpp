#include "memip/basis.hpp"

#include <cmath>
#include <string>

namespace memip {

double reconstruct(const ExpSumModel& model, int v, int u, double t) {
  if (v < 1 || v > model.d || u < 0 || u > model.d) {
    throw config_error("reconstruct: index out of range");
  }
  if (t < 0.0) throw config_error("reconstruct: t must be >= 0");
  double value = 0.0;
  for (int k = 1; k <= model.K; ++k) {
    const double rate = (u == 0 ? k - 1 : k) * model.alpha;
    value += model.at(v, u, k) * std::exp(-rate * t);
  }
  return value;
}

double reconstruct_integral(const ExpSumModel& model, int v, int u, double T) {
  if (v < 1 || v > model.d || u < 0 || u > model.d) {
    throw config_error("reconstruct_integral: index out of range");
  }
  if (T < 0.0) throw config_error("reconstruct_integral: T must be >= 0");
  double value = 0.0;
  for (int k = 1; k <= model.K; ++k) {
    const double rate = (u == 0 ? k - 1 : k) * model.alpha;
    const double weight =
        rate == 0.0 ? T : (1.0 - std::exp(-rate * T)) / rate;
    value += model.at(v, u, k) * weight;
  }
  return value;
}

std::vector<double> exp_sum_approx(const std::function<double(double)>& f,
                                   int K, double alpha, double T) {
  if (K < 1 || K > 30) throw config_error("approx: K must lie in [1, 30]");
  if (!(alpha > 0.0)) throw config_error("approx: alpha must be > 0");
  if (!(T > 0.0)) throw config_error("approx: T must be > 0");

  const long double a = std::exp(-static_cast<long double>(alpha) * T);
  const long double center = (a + 1.0L) / 2.0L;
  const long double half = (1.0L - a) / 2.0L;

  // Chebyshev-Lobatto nodes of [a, 1], outermost first; node j = 0 is y = 1
  // (t = 0) and node j = K is y = a (t = T).
  std::vector<long double> nodes(static_cast<std::size_t>(K) + 1);
  std::vector<long double> values(static_cast<std::size_t>(K) + 1);
  const long double pi = 3.14159265358979323846264338327950288L;
  for (int j = 0; j <= K; ++j) {
    long double y = center + half * std::cos(pi * j / K);
    if (j == 0) y = 1.0L;
    if (j == K) y = a;
    const double t = static_cast<double>(-std::log(y) / alpha);
    const double ft = f(std::min(std::max(t, 0.0), T));
    if (!std::isfinite(ft)) {
      throw numeric_error("approx: function not finite at t = " +
                          std::to_string(t));
    }
    nodes[static_cast<std::size_t>(j)] = y;
    values[static_cast<std::size_t>(j)] = ft;
  }

  // Newton divided differences over the y nodes.
  std::vector<long double> dd = values;
  for (int level = 1; level <= K; ++level) {
    for (int j = K; j >= level; --j) {
      dd[static_cast<std::size_t>(j)] =
          (dd[static_cast<std::size_t>(j)] -
           dd[static_cast<std::size_t>(j) - 1]) /
          (nodes[static_cast<std::size_t>(j)] -
           nodes[static_cast<std::size_t>(j) - level]);
    }
  }

  // Expand the nested Newton form to monomial coefficients in y:
  // p = dd[0] + (y - y_0)(dd[1] + (y - y_1)(... + (y - y_{K-1}) dd[K])).
  std::vector<long double> poly(static_cast<std::size_t>(K) + 1, 0.0L);
  int degree = 0;
  poly[0] = dd[static_cast<std::size_t>(K)];
  for (int j = K - 1; j >= 0; --j) {
    const long double y_j = nodes[static_cast<std::size_t>(j)];
    for (int i = degree + 1; i >= 1; --i) {
      poly[static_cast<std::size_t>(i)] =
          poly[static_cast<std::size_t>(i) - 1] -
          y_j * poly[static_cast<std::size_t>(i)];
    }
    poly[0] = dd[static_cast<std::size_t>(j)] - y_j * poly[0];
    ++degree;
  }

  std::vector<double> coefficients(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) {
    coefficients[i] = static_cast<double>(poly[i]);
  }
  return coefficients;
}

double exp_sum_value(const std::vector<double>& coefficients, double alpha,
                     double t) {
  const double y = std::exp(-alpha * t);
  // Horner in y = exp(-alpha t).
  double value = 0.0;
  for (std::size_t i = coefficients.size(); i-- > 0;) {
    value = value * y + coefficients[i];
  }
  return value;
}

double sup_error_on_grid(const std::function<double(double)>& f,
                         const std::vector<double>& coefficients, double alpha,
                         double T, int n) {
  if (n < 2) throw config_error("approx: grid needs at least 2 points");
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = T * i / (n - 1);
    const double err = std::abs(f(t) - exp_sum_value(coefficients, alpha, t));
    if (err > worst) worst = err;
  }
  return worst;
}

}  // namespace memip
