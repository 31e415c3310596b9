#pragma once

// Causal Wiener filters of a low-rank network.
//
//   H(z): y_m(t) projected on the present and past of y_l (causal).
//   S(z): each y_l(i)(t) projected on its own strict past and the present and
//         past of the other y_l channels; [S(inf)]_ii = 0 by construction.
//
// Both are available exactly from a model and by least squares from data.

#include <vector>

#include "lrdn/exec.hpp"
#include "lrdn/least_squares.hpp"
#include "lrdn/model.hpp"
#include "lrdn/sim.hpp"

namespace lrdn {

enum class Block { M, L };

const char* to_string(Block b);

inline constexpr int kDefaultOrder = 8;
/// Rows beyond the regressor count required before a fit is attempted.
inline constexpr Index kDesignMargin = 5;

struct EstimateOptions {
  int order = kDefaultOrder;
  double ridge = 0.0;
  double condition_bound = kDefaultConditionBound;
};

struct FilterEstimate {
  Block block = Block::L;
  int order = 0;
  Index m = 0;
  Index l = 1;
  double ridge = 0.0;
  /// m x l for Block::M, l x l for Block::L; degree = order.
  PolyMatrix coeffs{1, 1};
  /// (T - order) x rows.
  MatrixXd residuals;
  VectorXd rss;
  /// rss / (T' - k) per row.
  VectorXd residual_variance;
  /// Sum of squared targets per row over the fitted window.
  VectorXd target_energy;
  VectorXd gram_condition;
  std::vector<std::vector<Regressor>> design;
  /// groups[row][source] lists the design columns carrying that source.
  std::vector<std::vector<std::vector<Index>>> groups;
  std::vector<MatrixXd> gram_inverse;

  Index rows() const { return coeffs.rows(); }
  Index effective_samples() const { return residuals.rows(); }
  MatrixXd gram_inverse_block(Index row, Index source) const;
  /// Coefficients of the (row, source) group in design order.
  VectorXd group_coefficients(Index row, Index source) const;
};

/// Regressor layout used by estimate_h for every row: all y_l channels at
/// lags 0..order.
std::vector<Regressor> h_design(Index l, int order);
/// Regressor layout used by estimate_s for row i (0-based): own lags 1..order,
/// every other channel at lags 0..order.
std::vector<Regressor> s_design(Index l, Index row, int order);

/// Least squares of each y_m channel on y_l at lags 0..p.
FilterEstimate estimate_h(const TimeSeries& data, const EstimateOptions& opts = {}, Exec exec = Exec::Parallel);

/// Least squares of each y_l channel on its strict past and the others' past.
FilterEstimate estimate_s(const TimeSeries& data, const EstimateOptions& opts = {}, Exec exec = Exec::Parallel);

struct ExactFilters {
  PolyMatrix s{1, 1};
  PolyMatrix h{1, 1};
  VectorXd d;  ///< [D]_ii = [W_0]_ii
};

/// s = I - diag(d) (I - G_l), h = G_ml, d_i = [(I - G_l,0)^-1]_ii.
ExactFilters exact_filters(const LrdnModel& model);

/// S = I - diag([W_0]_11 .. [W_0]_ll) W^-1 with W^-1 the truncated inverse.
PolyMatrix exact_s_via_factor(const PolyMatrix& w, const InverseOptions& opts = {});

}  // namespace lrdn
