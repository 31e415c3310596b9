#include "lrdn/least_squares.hpp"

#include <cmath>
#include <string>

#include "lrdn/error.hpp"

namespace lrdn {

MatrixXd lag_design(const MatrixXd& source, const std::vector<Regressor>& columns, Index first_row) {
  const Index rows = source.rows() - first_row;
  if (rows < 1) throw Error(ErrorCode::InsufficientData, "no rows left after lags");
  MatrixXd x(rows, static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& r = columns[c];
    if (r.lag > first_row) throw Error(ErrorCode::InvalidConfig, "lag exceeds first design row");
    x.col(static_cast<Index>(c)) = source.col(r.channel).segment(first_row - r.lag, rows);
  }
  return x;
}

LsFit fit_least_squares(const MatrixXd& x, const VectorXd& y, const LsOptions& opts) {
  const Index n = x.rows();
  const Index k = x.cols();
  if (y.size() != n) throw Error(ErrorCode::ShapeMismatch, "design and target row counts differ");
  if (n < k) throw Error(ErrorCode::InsufficientData, "fewer rows than regressors");

  LsFit fit;
  if (k == 0) {
    fit.beta = VectorXd(0);
    fit.residual = y;
    fit.rss = y.squaredNorm();
    fit.gram_inverse = MatrixXd(0, 0);
    fit.gram_condition = 1.0;
    return fit;
  }

  MatrixXd xa = x;
  VectorXd ya = y;
  if (opts.ridge > 0.0) {
    xa.resize(n + k, k);
    xa.topRows(n) = x;
    xa.bottomRows(k) = std::sqrt(opts.ridge) * MatrixXd::Identity(k, k);
    ya = VectorXd::Zero(n + k);
    ya.head(n) = y;
  }

  const Eigen::HouseholderQR<MatrixXd> qr(xa);
  const MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<MatrixXd> svd(r);
  const auto& sv = svd.singularValues();
  const double smin = sv(k - 1);
  fit.gram_condition = smin > 0.0 ? (sv(0) / smin) * (sv(0) / smin) : std::numeric_limits<double>::infinity();
  if (opts.ridge == 0.0 && !(fit.gram_condition < opts.condition_bound)) {
    throw Error(ErrorCode::RankDeficientDesign, "cond(X'X) = " + std::to_string(fit.gram_condition));
  }

  const VectorXd qty = (qr.householderQ().transpose() * ya).head(k);
  const auto rt = r.triangularView<Eigen::Upper>();
  fit.beta = rt.solve(qty);
  fit.residual = y - x * fit.beta;
  fit.rss = fit.residual.squaredNorm();
  const MatrixXd rinv = rt.solve(MatrixXd::Identity(k, k));
  fit.gram_inverse = rinv * rinv.transpose();
  return fit;
}

VectorXd projection_residual(const MatrixXd& x, const VectorXd& y, double rank_threshold) {
  if (x.cols() == 0) return y;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
  qr.setThreshold(rank_threshold);
  const Index rank = qr.rank();
  if (rank == 0) return y;
  VectorXd qty = qr.householderQ().transpose() * y;
  qty.head(rank).setZero();
  return qr.householderQ() * qty;
}

}  // namespace lrdn
