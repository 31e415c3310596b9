#pragma once

// Matrix FIR filters sum_k C_k z^-k with real coefficients. Every transfer
// function in the library (network filters, spectral factors, Wiener filters,
// truncated inverses) is carried by this type.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace lrdn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kDefaultZeroTol = 1e-9;
inline constexpr double kDefaultDecayTol = 1e-8;
inline constexpr int kDefaultHorizon = 256;
inline constexpr double kDefaultConditionBound = 1e12;

class PolyMatrix {
 public:
  /// rows x cols zero polynomial with `degree + 1` zero coefficients.
  PolyMatrix(Index rows, Index cols, int degree = 0);
  explicit PolyMatrix(std::vector<MatrixXd> coeffs);

  static PolyMatrix identity(Index n);
  static PolyMatrix constant(const MatrixXd& c0);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  const MatrixXd& coeff(int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
  MatrixXd& coeff(int k) { return coeffs_.at(static_cast<std::size_t>(k)); }
  const std::vector<MatrixXd>& coeffs() const { return coeffs_; }

  /// Coefficient k, or zeros when k exceeds the degree.
  MatrixXd coeff_or_zero(int k) const;

  /// Strips trailing all-zero coefficients (degree 0 is always kept).
  PolyMatrix normalized() const;
  /// Zero-pads (or truncates) to exactly `degree`.
  PolyMatrix resized(int degree) const;

  /// Entry (i, j) as a scalar polynomial (1 x 1).
  PolyMatrix entry(Index i, Index j) const;
  /// Rows [first, first + count).
  PolyMatrix row_block(Index first, Index count) const;

  bool is_zero() const;

 private:
  Index rows_;
  Index cols_;
  std::vector<MatrixXd> coeffs_;
};

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator*(double s, const PolyMatrix& a);
/// Filter composition: C_k = sum_j A_j B_{k-j}, degree = deg A + deg B.
PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);
/// Left multiplication by a constant matrix.
PolyMatrix operator*(const MatrixXd& c, const PolyMatrix& a);

/// Stacks a over b; the result has the larger of the two degrees.
PolyMatrix vstack(const PolyMatrix& a, const PolyMatrix& b);

/// Frequency response sum_k C_k e^{-ik theta}.
MatrixXcd evaluate(const PolyMatrix& a, double theta);

/// Largest absolute coefficient difference, zero-padding the shorter operand.
double max_abs_diff(const PolyMatrix& a, const PolyMatrix& b);

struct TruncatedInverse {
  PolyMatrix inverse;
  double tail_norm;  ///< ||Q_horizon||_F
};

struct InverseOptions {
  int horizon = kDefaultHorizon;
  double decay_tol = kDefaultDecayTol;
  double condition_bound = kDefaultConditionBound;
};

/// Causal inverse of a square filter by the recursion
///   Q_0 = A_0^-1,  Q_k = -A_0^-1 sum_{j=1}^{min(k, deg A)} A_j Q_{k-j}.
/// Throws SingularLeadingCoefficient when cond(A_0) exceeds the bound and
/// NoDecay when the coefficient at the horizon has not decayed below
/// decay_tol (the filter is not minimum phase at that horizon).
TruncatedInverse truncated_inverse(const PolyMatrix& a, const InverseOptions& opts = {});

/// Same recursion without the decay check; the tail norm is still reported.
TruncatedInverse truncated_inverse_unchecked(const PolyMatrix& a, const InverseOptions& opts = {});

/// (i, j) is set iff some |[C_k]_ij| > zero_tol.
BoolMatrix support(const PolyMatrix& a, double zero_tol = kDefaultZeroTol);

/// Elementary column vector b_i of length l (i is 1-based).
VectorXd selector(Index i, Index l);
/// B_I: rows b_i' for the ordered 1-based index set I.
MatrixXd selector_rows(const std::vector<Index>& indices, Index l);

/// M_i(z) = I + (z^-1 - 1) b_i b_i'; i is 1-based.
PolyMatrix selector_shift(Index i, Index l);

}  // namespace lrdn
