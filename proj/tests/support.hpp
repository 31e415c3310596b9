#pragma once

// Small helpers shared by the unit tests.

#include <random>

#include "lrdn/polymat.hpp"

namespace lrdn::test {

inline PolyMatrix scalar_poly(std::initializer_list<double> c) {
  std::vector<MatrixXd> coeffs;
  for (double v : c) coeffs.push_back(MatrixXd::Constant(1, 1, v));
  return PolyMatrix(coeffs);
}

inline PolyMatrix random_poly(Index rows, Index cols, int degree, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PolyMatrix p(rows, cols, degree);
  for (int k = 0; k <= degree; ++k) {
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) p.coeff(k)(i, j) = u(rng);
    }
  }
  return p;
}

/// I + small strictly causal part; minimum phase whenever the sum of the
/// lag coefficient norms stays below one.
inline PolyMatrix random_stable(Index n, int degree, std::mt19937_64& rng) {
  PolyMatrix p = PolyMatrix::identity(n).resized(degree);
  const double scale = 0.4 / (static_cast<double>(n) * degree);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (int k = 1; k <= degree; ++k) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) p.coeff(k)(i, j) = u(rng);
    }
  }
  return p;
}

}  // namespace lrdn::test

#include "lrdn/model.hpp"

namespace lrdn::test {

inline LrdnModel make_model(const PolyMatrix& g_ml, const PolyMatrix& g_l, VectorXd sigma = {}) {
  LrdnModel model;
  model.m = g_ml.rows();
  model.l = g_l.rows();
  model.g_ml = g_ml;
  model.g_l = g_l;
  model.sigma_l = sigma.size() == 0 ? VectorXd::Ones(g_l.rows()) : sigma;
  return model;
}

/// Scalar AR(1) y(t) = a y(t-1) + w(t) with an optional y_m = c z^-1 y_l.
inline LrdnModel ar1(double a, Index m = 0, double c = 0.0) {
  PolyMatrix g_l(1, 1, 1);
  g_l.coeff(1)(0, 0) = a;
  PolyMatrix g_ml(m, 1, 1);
  if (m > 0) g_ml.coeff(1).setConstant(c);
  return make_model(g_ml, g_l);
}

inline GeneratorConfig small_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.m = 3;
  c.l = 3;
  c.edges_ml = 5;
  c.edges_l = 4;
  c.rng_seed = seed;
  return c;
}

}  // namespace lrdn::test
