#include "lrdn/wiener.hpp"

#include <string>

#include "lrdn/error.hpp"

namespace lrdn {

const char* to_string(Block b) { return b == Block::M ? "M_BLOCK" : "L_BLOCK"; }

MatrixXd FilterEstimate::gram_inverse_block(Index row, Index source) const {
  const auto& idx = groups.at(static_cast<std::size_t>(row)).at(static_cast<std::size_t>(source));
  const MatrixXd& g = gram_inverse.at(static_cast<std::size_t>(row));
  const auto n = static_cast<Index>(idx.size());
  MatrixXd out(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) out(a, b) = g(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return out;
}

VectorXd FilterEstimate::group_coefficients(Index row, Index source) const {
  const auto& cols = design.at(static_cast<std::size_t>(row));
  const auto& idx = groups.at(static_cast<std::size_t>(row)).at(static_cast<std::size_t>(source));
  VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const auto& r = cols[static_cast<std::size_t>(idx[a])];
    out(static_cast<Index>(a)) = coeffs.coeff(r.lag)(row, r.channel);
  }
  return out;
}

std::vector<Regressor> h_design(Index l, int order) {
  std::vector<Regressor> cols;
  for (Index j = 0; j < l; ++j) {
    for (int k = 0; k <= order; ++k) cols.push_back({j, k});
  }
  return cols;
}

std::vector<Regressor> s_design(Index l, Index row, int order) {
  std::vector<Regressor> cols;
  for (Index j = 0; j < l; ++j) {
    for (int k = (j == row ? 1 : 0); k <= order; ++k) cols.push_back({j, k});
  }
  return cols;
}

namespace {

FilterEstimate fit_block(const TimeSeries& data, Block block, const EstimateOptions& opts, Exec exec) {
  check_series(data);
  if (opts.order < 0) throw Error(ErrorCode::InvalidConfig, "order must be >= 0");
  if (block == Block::M && data.m < 1) throw Error(ErrorCode::InvalidConfig, "H estimation needs m >= 1");
  if (block == Block::L && opts.order < 1 && data.l == 1) {
    throw Error(ErrorCode::InvalidConfig, "S estimation of a single channel needs order >= 1");
  }

  const Index l = data.l;
  const Index rows = block == Block::M ? data.m : l;
  const int p = opts.order;
  const Index t_eff = data.num_samples() - p;
  const auto k_max = static_cast<Index>(block == Block::M ? h_design(l, p).size() : s_design(l, 0, p).size());
  if (t_eff <= k_max + kDesignMargin) {
    throw Error(ErrorCode::InsufficientData, "T = " + std::to_string(data.num_samples()) + " too short for " +
                                                 std::to_string(k_max) + " regressors at order " + std::to_string(p));
  }

  const MatrixXd source = data.y_l();
  const MatrixXd targets = block == Block::M ? MatrixXd(data.y_m()) : source;

  FilterEstimate est;
  est.block = block;
  est.order = p;
  est.m = data.m;
  est.l = l;
  est.ridge = opts.ridge;
  est.coeffs = PolyMatrix(rows, l, p);
  est.residuals.resize(t_eff, rows);
  est.rss.resize(rows);
  est.residual_variance.resize(rows);
  est.target_energy.resize(rows);
  est.gram_condition.resize(rows);
  est.design.resize(static_cast<std::size_t>(rows));
  est.groups.resize(static_cast<std::size_t>(rows));
  est.gram_inverse.resize(static_cast<std::size_t>(rows));

  const LsOptions ls{opts.ridge, opts.condition_bound};
  std::vector<LsFit> fits(static_cast<std::size_t>(rows));
  for_each_index(exec, static_cast<std::size_t>(rows), [&](std::size_t r) {
    const auto row = static_cast<Index>(r);
    est.design[r] = block == Block::M ? h_design(l, p) : s_design(l, row, p);
    const MatrixXd x = lag_design(source, est.design[r], p);
    const VectorXd y = targets.col(row).tail(t_eff);
    fits[r] = fit_least_squares(x, y, ls);
    est.target_energy(row) = y.squaredNorm();
  });

  // Assembly in row order.
  for (Index row = 0; row < rows; ++row) {
    auto& fit = fits[static_cast<std::size_t>(row)];
    const auto& cols = est.design[static_cast<std::size_t>(row)];
    auto& groups = est.groups[static_cast<std::size_t>(row)];
    groups.assign(static_cast<std::size_t>(l), {});
    for (std::size_t c = 0; c < cols.size(); ++c) {
      est.coeffs.coeff(cols[c].lag)(row, cols[c].channel) = fit.beta(static_cast<Index>(c));
      groups[static_cast<std::size_t>(cols[c].channel)].push_back(static_cast<Index>(c));
    }
    est.residuals.col(row) = fit.residual;
    est.rss(row) = fit.rss;
    est.residual_variance(row) = fit.rss / static_cast<double>(t_eff - static_cast<Index>(cols.size()));
    est.gram_condition(row) = fit.gram_condition;
    est.gram_inverse[static_cast<std::size_t>(row)] = std::move(fit.gram_inverse);
  }
  return est;
}

}  // namespace

FilterEstimate estimate_h(const TimeSeries& data, const EstimateOptions& opts, Exec exec) {
  return fit_block(data, Block::M, opts, exec);
}

FilterEstimate estimate_s(const TimeSeries& data, const EstimateOptions& opts, Exec exec) {
  return fit_block(data, Block::L, opts, exec);
}

ExactFilters exact_filters(const LrdnModel& model) {
  require_valid(model);
  const Index l = model.l;
  const MatrixXd w0 = (MatrixXd::Identity(l, l) - model.g_l.coeff(0)).inverse();
  ExactFilters f;
  f.d = w0.diagonal();
  const PolyMatrix id = PolyMatrix::identity(l);
  f.s = (id - MatrixXd(f.d.asDiagonal()) * (id - model.g_l)).resized(model.g_l.degree());
  f.h = model.g_ml;

  const double diag0 = f.s.coeff(0).diagonal().cwiseAbs().maxCoeff();
  if (diag0 >= 1e-12) {
    throw Error(ErrorCode::InvalidModel, "[S(inf)]_ii = " + std::to_string(diag0) + " is not zero");
  }
  BoolMatrix ss = support(f.s);
  BoolMatrix sg = support(model.g_l);
  ss.diagonal().setConstant(false);
  sg.diagonal().setConstant(false);
  if (ss != sg) throw Error(ErrorCode::InvalidModel, "off-diagonal support of S differs from G_l");
  return f;
}

PolyMatrix exact_s_via_factor(const PolyMatrix& w, const InverseOptions& opts) {
  if (w.rows() != w.cols()) throw Error(ErrorCode::ShapeMismatch, "spectral factor must be square");
  const auto inv = truncated_inverse(w, opts);
  const Index l = w.rows();
  const MatrixXd d = w.coeff(0).diagonal().asDiagonal();
  PolyMatrix s = (-1.0) * (d * inv.inverse);
  s.coeff(0) += MatrixXd::Identity(l, l);
  return s;
}

}  // namespace lrdn
