#pragma once

#include <cstdint>

#include "lrdn/model.hpp"

namespace lrdn {

inline constexpr int kDefaultBurnIn = 500;

/// Samples y(1..T) as a T x (m + l) matrix; the first m columns are y_m and
/// the last l columns are y_l.
struct TimeSeries {
  Index m = 0;
  Index l = 1;
  MatrixXd data;
  std::uint64_t seed = 0;  ///< 0 for external data
  int burn_in = 0;

  Index num_samples() const { return data.rows(); }
  Index channels() const { return data.cols(); }
  auto y_m() const { return data.leftCols(m); }
  auto y_l() const { return data.rightCols(l); }
};

/// Throws ShapeMismatch unless T >= 1 and the column count is m + l.
void check_series(const TimeSeries& ts);

/// Recursion y_l(t) = (I - G_l,0)^-1 [w_l(t) + sum_{k>=1} G_l,k y_l(t-k)] from
/// zero history, with w_l ~ N(0, diag(sigma_l)); the first burn_in samples are
/// dropped. y_m is the FIR image of y_l including pre-window history.
TimeSeries simulate(const LrdnModel& model, Index T, int burn_in, std::uint64_t seed);

/// y(t) = sum_k C_k e(t - k) with e ~ N(0, diag(sigma)) drawn from the same
/// stream layout as simulate(), so both routes agree on matched seeds.
/// The transfer's first `m` rows are labelled y_m.
TimeSeries simulate_from_factor(const PolyMatrix& full_transfer, const VectorXd& sigma, Index m, Index T,
                                int burn_in, std::uint64_t seed);

/// Draws the (burn_in + T) x l standard-normal innovation block used by both
/// simulators; row t holds e(t) / sqrt(sigma).
MatrixXd standard_normal_block(Index rows, Index cols, std::uint64_t seed);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Per-trial seed: mix64(master ^ mix64(stream * 2^32 + index + 1)). Pure, so
/// serial and parallel Monte-Carlo runs draw the same streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

}  // namespace lrdn
