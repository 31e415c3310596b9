#pragma once

#include <vector>

#include "lrdn/polymat.hpp"

namespace lrdn {

/// One column of a lagged design: source channel (0-based within the source
/// block) at the given lag.
struct Regressor {
  Index channel;
  int lag;
  bool operator==(const Regressor&) const = default;
};

/// Rows t = first_row .. T-1 of the design, entry source(t - lag, channel).
MatrixXd lag_design(const MatrixXd& source, const std::vector<Regressor>& columns, Index first_row);

struct LsOptions {
  double ridge = 0.0;
  /// Bound on cond(X'X); exceeded with ridge == 0 raises RankDeficientDesign.
  double condition_bound = kDefaultConditionBound;
};

struct LsFit {
  VectorXd beta;
  VectorXd residual;
  double rss = 0.0;
  MatrixXd gram_inverse;  ///< (X'X + ridge I)^-1
  double gram_condition = 0.0;
};

/// Householder QR of the (ridge-augmented) design; backward stable.
LsFit fit_least_squares(const MatrixXd& x, const VectorXd& y, const LsOptions& opts = {});

/// Residual of projecting y onto the column space of x with a rank-revealing
/// decomposition; collinear designs are allowed. Returns y when x has no columns.
VectorXd projection_residual(const MatrixXd& x, const VectorXd& y, double rank_threshold = 1e-10);

}  // namespace lrdn
