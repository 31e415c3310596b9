#include "lrdn/polymat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrdn/error.hpp"

namespace lrdn {

namespace {

std::string shape_str(const PolyMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const PolyMatrix& a, const PolyMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
  }
}

}  // namespace

PolyMatrix::PolyMatrix(Index rows, Index cols, int degree) : rows_(rows), cols_(cols) {
  // Zero-row blocks are allowed so that a model with m = 0 still has a g_ml.
  if (rows < 0 || cols < 1 || degree < 0) {
    throw Error(ErrorCode::ShapeMismatch, "polynomial matrix needs cols >= 1 and degree >= 0");
  }
  coeffs_.assign(static_cast<std::size_t>(degree) + 1, MatrixXd::Zero(rows, cols));
}

PolyMatrix::PolyMatrix(std::vector<MatrixXd> coeffs) : rows_(0), cols_(0), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorCode::ShapeMismatch, "no coefficients");
  rows_ = coeffs_.front().rows();
  cols_ = coeffs_.front().cols();
  if (rows_ < 0 || cols_ < 1) throw Error(ErrorCode::ShapeMismatch, "empty coefficient matrix");
  for (const auto& c : coeffs_) {
    if (c.rows() != rows_ || c.cols() != cols_) {
      throw Error(ErrorCode::ShapeMismatch, "coefficients differ in shape");
    }
  }
}

PolyMatrix PolyMatrix::identity(Index n) { return constant(MatrixXd::Identity(n, n)); }

PolyMatrix PolyMatrix::constant(const MatrixXd& c0) { return PolyMatrix(std::vector<MatrixXd>{c0}); }

MatrixXd PolyMatrix::coeff_or_zero(int k) const {
  if (k < 0 || k > degree()) return MatrixXd::Zero(rows_, cols_);
  return coeffs_[static_cast<std::size_t>(k)];
}

PolyMatrix PolyMatrix::normalized() const {
  std::size_t n = coeffs_.size();
  while (n > 1 && coeffs_[n - 1].isZero(0.0)) --n;
  return PolyMatrix(std::vector<MatrixXd>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n)));
}

PolyMatrix PolyMatrix::resized(int degree) const {
  if (degree < 0) throw Error(ErrorCode::ShapeMismatch, "negative degree");
  std::vector<MatrixXd> c(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) c[static_cast<std::size_t>(k)] = coeff_or_zero(k);
  return PolyMatrix(std::move(c));
}

PolyMatrix PolyMatrix::entry(Index i, Index j) const {
  std::vector<MatrixXd> c;
  c.reserve(coeffs_.size());
  for (const auto& ck : coeffs_) c.push_back(MatrixXd::Constant(1, 1, ck(i, j)));
  return PolyMatrix(std::move(c));
}

PolyMatrix PolyMatrix::row_block(Index first, Index count) const {
  if (first < 0 || count < 1 || first + count > rows_) {
    throw Error(ErrorCode::IndexOutOfRange, "row block outside " + shape_str(*this));
  }
  std::vector<MatrixXd> c;
  c.reserve(coeffs_.size());
  for (const auto& ck : coeffs_) c.push_back(ck.middleRows(first, count));
  return PolyMatrix(std::move(c));
}

bool PolyMatrix::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const MatrixXd& c) { return c.isZero(0.0); });
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
  require_same_shape(a, b, "add");
  const int n = std::max(a.degree(), b.degree());
  PolyMatrix out(a.rows(), a.cols(), n);
  for (int k = 0; k <= n; ++k) out.coeff(k) = a.coeff_or_zero(k) + b.coeff_or_zero(k);
  return out.normalized();
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) { return a + (-1.0) * b; }

PolyMatrix operator*(double s, const PolyMatrix& a) {
  std::vector<MatrixXd> c;
  c.reserve(a.coeffs().size());
  for (const auto& ck : a.coeffs()) c.push_back(s * ck);
  return PolyMatrix(std::move(c));
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "multiply: " + shape_str(a) + " * " + shape_str(b));
  }
  const int n = a.degree() + b.degree();
  PolyMatrix out(a.rows(), b.cols(), n);
  for (int i = 0; i <= a.degree(); ++i) {
    if (a.coeff(i).isZero(0.0)) continue;
    for (int j = 0; j <= b.degree(); ++j) out.coeff(i + j).noalias() += a.coeff(i) * b.coeff(j);
  }
  return out;
}

PolyMatrix operator*(const MatrixXd& c, const PolyMatrix& a) {
  if (c.cols() != a.rows()) throw Error(ErrorCode::ShapeMismatch, "constant multiply");
  std::vector<MatrixXd> out;
  out.reserve(a.coeffs().size());
  for (const auto& ck : a.coeffs()) out.push_back(c * ck);
  return PolyMatrix(std::move(out));
}

PolyMatrix vstack(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::ShapeMismatch, "vstack column mismatch");
  const int n = std::max(a.degree(), b.degree());
  PolyMatrix out(a.rows() + b.rows(), a.cols(), n);
  for (int k = 0; k <= n; ++k) {
    out.coeff(k).topRows(a.rows()) = a.coeff_or_zero(k);
    out.coeff(k).bottomRows(b.rows()) = b.coeff_or_zero(k);
  }
  return out;
}

MatrixXcd evaluate(const PolyMatrix& a, double theta) {
  MatrixXcd out = MatrixXcd::Zero(a.rows(), a.cols());
  for (int k = 0; k <= a.degree(); ++k) {
    const std::complex<double> zk = std::polar(1.0, -theta * k);
    out += zk * a.coeff(k).cast<std::complex<double>>();
  }
  return out;
}

double max_abs_diff(const PolyMatrix& a, const PolyMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  const int n = std::max(a.degree(), b.degree());
  for (int k = 0; k <= n; ++k) {
    worst = std::max(worst, (a.coeff_or_zero(k) - b.coeff_or_zero(k)).cwiseAbs().maxCoeff());
  }
  return worst;
}

TruncatedInverse truncated_inverse_unchecked(const PolyMatrix& a, const InverseOptions& opts) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "inverse of non-square filter");
  if (opts.horizon < 1) throw Error(ErrorCode::InvalidConfig, "horizon must be positive");

  const MatrixXd& a0 = a.coeff(0);
  Eigen::JacobiSVD<MatrixXd> svd(a0);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(cond < opts.condition_bound)) {
    throw Error(ErrorCode::SingularLeadingCoefficient,
                "cond(A_0) = " + std::to_string(cond) + " exceeds bound");
  }
  const Eigen::PartialPivLU<MatrixXd> lu(a0);

  const Index n = a.rows();
  PolyMatrix q(n, n, opts.horizon);
  q.coeff(0) = lu.solve(MatrixXd::Identity(n, n));
  MatrixXd acc(n, n);
  for (int k = 1; k <= opts.horizon; ++k) {
    acc.setZero();
    const int top = std::min(k, a.degree());
    for (int j = 1; j <= top; ++j) acc.noalias() += a.coeff(j) * q.coeff(k - j);
    q.coeff(k) = -lu.solve(acc);
  }
  const double tail = q.coeff(opts.horizon).norm();
  return {std::move(q), tail};
}

TruncatedInverse truncated_inverse(const PolyMatrix& a, const InverseOptions& opts) {
  auto out = truncated_inverse_unchecked(a, opts);
  if (!(out.tail_norm <= opts.decay_tol)) {
    throw Error(ErrorCode::NoDecay, "tail norm " + std::to_string(out.tail_norm) + " at horizon " +
                                        std::to_string(opts.horizon));
  }
  return out;
}

BoolMatrix support(const PolyMatrix& a, double zero_tol) {
  BoolMatrix s = BoolMatrix::Constant(a.rows(), a.cols(), false);
  for (const auto& ck : a.coeffs()) s = s.array() || (ck.array().abs() > zero_tol);
  return s;
}

VectorXd selector(Index i, Index l) {
  if (i < 1 || i > l) throw Error(ErrorCode::IndexOutOfRange, "selector index out of range");
  VectorXd b = VectorXd::Zero(l);
  b(i - 1) = 1.0;
  return b;
}

MatrixXd selector_rows(const std::vector<Index>& indices, Index l) {
  MatrixXd out(static_cast<Index>(indices.size()), l);
  for (std::size_t r = 0; r < indices.size(); ++r) out.row(static_cast<Index>(r)) = selector(indices[r], l).transpose();
  return out;
}

PolyMatrix selector_shift(Index i, Index l) {
  const VectorXd b = selector(i, l);
  PolyMatrix m(l, l, 1);
  m.coeff(0) = MatrixXd::Identity(l, l) - b * b.transpose();
  m.coeff(1) = b * b.transpose();
  return m;
}

}  // namespace lrdn
