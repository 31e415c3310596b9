#include "lrdn/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lrdn/error.hpp"

namespace lrdn {

namespace {

std::vector<double> grid_angles(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "grid needs at least one point");
  std::vector<double> theta(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) theta[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / n;
  return theta;
}

double condition(const MatrixXcd& a) {
  Eigen::JacobiSVD<MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

SpectralGrid SpectralGrid::diagonal_block(Index first, Index count) const {
  SpectralGrid out;
  out.theta = theta;
  out.values.reserve(values.size());
  for (const auto& v : values) out.values.push_back(v.block(first, first, count, count));
  return out;
}

double SpectralGrid::hermitian_error() const {
  double worst = 0.0;
  for (const auto& v : values) worst = std::max(worst, (v - v.adjoint()).cwiseAbs().maxCoeff());
  return worst;
}

double SpectralGrid::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& v : values) {
    const MatrixXcd herm = 0.5 * (v + v.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

SpectralGrid spectrum_of_model(const LrdnModel& model, int num_points, const InverseOptions& opts, Exec exec) {
  require_valid(model);
  const auto rf = reduced_form(model, opts);
  SpectralGrid grid;
  grid.theta = grid_angles(num_points);
  grid.values.resize(grid.theta.size());
  const MatrixXcd lambda = model.sigma_l.cast<std::complex<double>>().asDiagonal();
  for_each_index(exec, grid.theta.size(), [&](std::size_t j) {
    const MatrixXcd tf = evaluate(rf.full_transfer, grid.theta[j]);
    grid.values[j] = tf * lambda * tf.adjoint();
  });
  return grid;
}

SpectralFactor spectral_factor_of_model(const LrdnModel& model, const InverseOptions& opts) {
  require_valid(model);
  auto rf = reduced_form(model, opts);
  return {std::move(rf.w_factor), model.sigma_l};
}

double factorization_residual(const SpectralGrid& phi_l, const SpectralFactor& factor) {
  const MatrixXcd lambda = factor.lambda.cast<std::complex<double>>().asDiagonal();
  double worst = 0.0;
  for (std::size_t j = 0; j < phi_l.size(); ++j) {
    const MatrixXcd w = evaluate(factor.w, phi_l.theta[j]);
    worst = std::max(worst, (phi_l.values[j] - w * lambda * w.adjoint()).norm());
  }
  return worst;
}

std::vector<MatrixXcd> h_closed_form(const LrdnModel& model, int num_points, const InverseOptions& opts, Exec exec) {
  const auto phi = spectrum_of_model(model, num_points, opts, exec);
  const Index m = model.m;
  const Index l = model.l;
  std::vector<MatrixXcd> h(phi.size());
  for_each_index(exec, phi.size(), [&](std::size_t j) {
    const MatrixXcd& v = phi.values[j];
    const MatrixXcd phi_l = v.bottomRightCorner(l, l);
    const MatrixXcd phi_lm = v.bottomLeftCorner(l, m);
    const double cond = condition(phi_l);
    if (!(cond < kDefaultConditionBound)) {
      throw Error(ErrorCode::SingularBlock, "cond(Phi_l) = " + std::to_string(cond) + " at grid point " +
                                                std::to_string(j));
    }
    // H Phi_l = Phi_lm^H  <=>  Phi_l^H H^H = Phi_lm, and Phi_l is Hermitian.
    h[j] = phi_l.partialPivLu().solve(phi_lm).adjoint();
  });
  return h;
}

std::vector<VectorXd> singular_values(const SpectralGrid& grid, Exec exec) {
  std::vector<VectorXd> out(grid.size());
  for_each_index(exec, grid.size(), [&](std::size_t j) {
    Eigen::JacobiSVD<MatrixXcd> svd(grid.values[j]);
    out[j] = svd.singularValues();
  });
  return out;
}

std::vector<Index> numerical_rank(const SpectralGrid& grid, double rel_tol, Exec exec) {
  const auto sv = singular_values(grid, exec);
  std::vector<Index> rank(sv.size());
  for (std::size_t j = 0; j < sv.size(); ++j) {
    const double cut = rel_tol * sv[j](0);
    rank[j] = (sv[j].array() > cut).count();
  }
  return rank;
}

BoolMatrix inverse_support_fullrank(const SpectralGrid& phi_l, double zero_tol, double condition_bound) {
  if (phi_l.size() == 0) throw Error(ErrorCode::InvalidConfig, "empty grid");
  const Index n = phi_l.values.front().rows();
  MatrixXd peak = MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < phi_l.size(); ++j) {
    const double cond = condition(phi_l.values[j]);
    if (!(cond < condition_bound)) {
      throw Error(ErrorCode::SingularBlock, "spectrum singular at grid point " + std::to_string(j));
    }
    const MatrixXcd inv = phi_l.values[j].inverse();
    peak = peak.cwiseMax(inv.cwiseAbs());
  }
  return (peak.array() > zero_tol).matrix();
}

}  // namespace lrdn
