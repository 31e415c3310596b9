#pragma once

// Spectra on the uniform grid theta_j = 2 pi j / N. All rank and support
// tests in this module are max-over-grid tests.

#include <vector>

#include "lrdn/exec.hpp"
#include "lrdn/model.hpp"

namespace lrdn {

inline constexpr int kDefaultGridPoints = 64;
inline constexpr double kRankTolerance = 1e-6;

struct SpectralGrid {
  std::vector<double> theta;
  std::vector<MatrixXcd> values;

  std::size_t size() const { return values.size(); }
  /// Sub-block [first, first + count) x [first, first + count) at every point.
  SpectralGrid diagonal_block(Index first, Index count) const;
  /// Largest deviation from Hermitian symmetry over the grid.
  double hermitian_error() const;
  /// Smallest eigenvalue over the grid (of the Hermitian part).
  double min_eigenvalue() const;
};

/// Phi(theta) = Tf diag(sigma_l) Tf^H with Tf the full transfer [G_ml W; W].
SpectralGrid spectrum_of_model(const LrdnModel& model, int num_points = kDefaultGridPoints,
                               const InverseOptions& opts = {}, Exec exec = Exec::Parallel);

struct SpectralFactor {
  PolyMatrix w;     ///< (I - G_l)^-1, truncated
  VectorXd lambda;  ///< innovation variances (= sigma_l)
};

/// Canonical minimum-phase factor of Phi_l built from the model side.
SpectralFactor spectral_factor_of_model(const LrdnModel& model, const InverseOptions& opts = {});

/// max_theta || Phi_l - W diag(Lambda) W^H ||_F.
double factorization_residual(const SpectralGrid& phi_l, const SpectralFactor& factor);

/// H(theta) = Phi_lm(theta)^H Phi_l(theta)^-1 per grid point (m x l). Throws
/// SingularBlock when Phi_l is too ill-conditioned at some point.
std::vector<MatrixXcd> h_closed_form(const LrdnModel& model, int num_points = kDefaultGridPoints,
                                     const InverseOptions& opts = {}, Exec exec = Exec::Parallel);

/// Singular values (descending) of each grid matrix.
std::vector<VectorXd> singular_values(const SpectralGrid& grid, Exec exec = Exec::Parallel);

/// Numerical rank per grid point at a relative singular-value cutoff.
std::vector<Index> numerical_rank(const SpectralGrid& grid, double rel_tol = kRankTolerance,
                                  Exec exec = Exec::Parallel);

/// (k, h) set iff max_theta |[Phi_l(theta)^-1]_kh| > zero_tol. Only
/// meaningful on the full-rank block; throws SingularBlock otherwise.
BoolMatrix inverse_support_fullrank(const SpectralGrid& phi_l, double zero_tol = kDefaultZeroTol,
                                    double condition_bound = kDefaultConditionBound);

}  // namespace lrdn
