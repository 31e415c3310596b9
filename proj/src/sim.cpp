#include "lrdn/sim.hpp"

#include <cmath>
#include <random>

#include "lrdn/error.hpp"

namespace lrdn {

void check_series(const TimeSeries& ts) {
  if (ts.m < 0 || ts.l < 1 || ts.data.cols() != ts.m + ts.l) {
    throw Error(ErrorCode::ShapeMismatch, "time series columns do not match m + l");
  }
  if (ts.data.rows() < 1) throw Error(ErrorCode::InsufficientData, "time series has no samples");
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  return mix64(master ^ mix64((stream << 32) + index + 1));
}

MatrixXd standard_normal_block(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd z(rows, cols);
  for (Index t = 0; t < rows; ++t) {
    for (Index i = 0; i < cols; ++i) z(t, i) = normal(rng);
  }
  return z;
}

TimeSeries simulate(const LrdnModel& model, Index T, int burn_in, std::uint64_t seed) {
  require_valid(model);
  if (T < 1 || burn_in < 0) throw Error(ErrorCode::InvalidConfig, "need T >= 1 and burn_in >= 0");

  const Index l = model.l;
  const Index total = T + burn_in;
  const VectorXd scale = model.sigma_l.cwiseSqrt();
  MatrixXd noise = standard_normal_block(total, l, seed);
  noise = noise * scale.asDiagonal();

  const Eigen::PartialPivLU<MatrixXd> lead(MatrixXd::Identity(l, l) - model.g_l.coeff(0));
  MatrixXd yl(total, l);
  VectorXd acc(l);
  for (Index t = 0; t < total; ++t) {
    acc = noise.row(t).transpose();
    for (int k = 1; k <= model.g_l.degree() && k <= t; ++k) acc.noalias() += model.g_l.coeff(k) * yl.row(t - k).transpose();
    yl.row(t) = lead.solve(acc).transpose();
  }

  TimeSeries ts;
  ts.m = model.m;
  ts.l = l;
  ts.seed = seed;
  ts.burn_in = burn_in;
  ts.data.resize(T, model.m + l);
  ts.data.rightCols(l) = yl.bottomRows(T);
  if (model.m > 0) {
    for (Index r = 0; r < T; ++r) {
      const Index t = r + burn_in;
      VectorXd ym = VectorXd::Zero(model.m);
      for (int k = 0; k <= model.g_ml.degree() && k <= t; ++k) ym.noalias() += model.g_ml.coeff(k) * yl.row(t - k).transpose();
      ts.data.row(r).head(model.m) = ym.transpose();
    }
  }
  return ts;
}

TimeSeries simulate_from_factor(const PolyMatrix& full_transfer, const VectorXd& sigma, Index m, Index T,
                                int burn_in, std::uint64_t seed) {
  const Index l = full_transfer.cols();
  if (sigma.size() != l || !(sigma.minCoeff() > 0.0)) {
    throw Error(ErrorCode::ShapeMismatch, "sigma must have one positive entry per transfer column");
  }
  if (m < 0 || full_transfer.rows() - m != l) {
    throw Error(ErrorCode::ShapeMismatch, "transfer must have m + l rows for l columns");
  }
  if (T < 1 || burn_in < 0) throw Error(ErrorCode::InvalidConfig, "need T >= 1 and burn_in >= 0");

  const Index total = T + burn_in;
  MatrixXd e = standard_normal_block(total, l, seed);
  e = e * sigma.cwiseSqrt().asDiagonal();

  TimeSeries ts;
  ts.m = m;
  ts.l = l;
  ts.seed = seed;
  ts.burn_in = burn_in;
  ts.data = MatrixXd::Zero(T, full_transfer.rows());
  for (Index r = 0; r < T; ++r) {
    const Index t = r + burn_in;
    VectorXd y = VectorXd::Zero(full_transfer.rows());
    for (int k = 0; k <= full_transfer.degree() && k <= t; ++k) y.noalias() += full_transfer.coeff(k) * e.row(t - k).transpose();
    ts.data.row(r) = y.transpose();
  }
  return ts;
}

}  // namespace lrdn
