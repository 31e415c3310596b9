#pragma once

// Topology decisions. For j in V_l:
//   (i, j) in E  <=>  [H]_{i, j-m} != 0   when i <= m,
//                     [S]_{i-m, j-m} != 0 when i >  m,
// tested on data by nested least-squares F-tests (deterministic H rows are
// decided by coefficient-group norm instead).

#include <optional>
#include <vector>

#include "lrdn/exec.hpp"
#include "lrdn/wiener.hpp"

namespace lrdn {

enum class Correction { None, Bonferroni };

struct EdgeTestOptions {
  double alpha = 0.01;
  /// Group-norm threshold for rows fitted without residual.
  double h_norm_threshold = 1e-6;
  /// A row counts as deterministic when rss <= tol^2 * sum(y^2).
  double deterministic_tol = 1e-8;
};

struct EdgeTestResult {
  Index target = 0;  ///< node i in V
  Index source = 0;  ///< node j in V_l
  double statistic = 0.0;
  double p_value = 1.0;
  double coeff_norm = 0.0;
  bool decision = false;
  bool deterministic = false;  ///< decided by norm threshold
  Index df1 = 0;
  Index df2 = 0;
};

/// Refits the target row without the source's regressor group and compares
/// residual sums: F = ((RSS_r - RSS_f) / g) / (RSS_f / (T' - k)), p-value
/// from F(g, T' - k). `est` must have been fitted on `data`.
EdgeTestResult edge_test(const FilterEstimate& est, const TimeSeries& data, Index target, Index source,
                         const EdgeTestOptions& opts = {});

/// RSS increase from dropping a group, computed from the stored coefficients
/// and Gram inverse (Wald form) instead of a refit.
double rss_increase_wald(const FilterEstimate& est, Index row, Index source_channel);

struct NetworkEstimate {
  std::optional<FilterEstimate> h;  ///< absent when m == 0
  FilterEstimate s;
};

NetworkEstimate estimate_network(const TimeSeries& data, const EstimateOptions& opts = {},
                                 Exec exec = Exec::Parallel);

struct Decision {
  DirectedGraph graph{0, 1};
  std::vector<EdgeTestResult> tests;  ///< ordered by (target, source)
  double alpha_used = 0.0;
};

/// Tests every (i, j) in V x V_l and returns the decided graph. Bonferroni
/// divides alpha by (m + l) * l.
Decision decide_graph(const NetworkEstimate& est, const TimeSeries& data, const EdgeTestOptions& opts = {},
                      Correction correction = Correction::None, Exec exec = Exec::Parallel);

Decision decide_graph(const FilterEstimate& h_est, const FilterEstimate& s_est, const TimeSeries& data,
                      const EdgeTestOptions& opts = {}, Correction correction = Correction::None,
                      Exec exec = Exec::Parallel);

/// Population decision: supports of exact filters.
DirectedGraph population_graph(const ExactFilters& filters, Index m, double zero_tol = kDefaultZeroTol);

struct GraphMetrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  /// An empty estimate has undefined precision; it is reported as 1 with
  /// precision_defined = false. Likewise recall for an empty truth.
  double precision = 1.0;
  double recall = 1.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool exact_match = false;
};

GraphMetrics compare_graphs(const DirectedGraph& estimated, const DirectedGraph& truth);

/// Off-diagonal support of W^-1 equals that of S (W from the reduced form).
bool corollary1_check(const LrdnModel& model, const InverseOptions& opts = {}, double zero_tol = kDefaultZeroTol);

struct PartitionOptions {
  int max_lag = kDefaultOrder;
  double rank_tol = 1e-6;
  /// Pivot ratios must stay outside [rank_tol / sqrt(gap), rank_tol * sqrt(gap)].
  double gap = 10.0;
};

struct Partition {
  std::vector<Index> l_indices;    ///< 1-based, ascending
  std::vector<Index> m_indices;    ///< 1-based, ascending
  std::vector<Index> pivot_order;  ///< 1-based, selection order
  std::vector<double> pivot_ratios;  ///< relative innovation residual at each pick
  double rank_gap = 0.0;           ///< smallest retained / largest discarded ratio
  double relation_ratio = 0.0;  ///< worst relative residual of an m channel on the l set
  std::size_t subsets_tried = 0;

  Index l() const { return static_cast<Index>(l_indices.size()); }
  Index m() const { return static_cast<Index>(m_indices.size()); }
};

/// Two passes. The rank l comes from greedy pivoting on one-step innovations:
/// each channel is reduced to its residual on every channel's lags 1..q, then
/// channels are picked by largest remaining residual energy, each pick
/// projected out of the others, until every candidate's residual is below
/// rank_tol times its own energy (ties to the lowest index). The channel set
/// is then the first size-l subset, in pivot order and then by innovation
/// energy, on whose lags 0..q every other channel regresses exactly.
/// Throws AmbiguousRank when a ratio falls inside the gap band or no subset
/// works, and InsufficientData when T <= 10 q n.
Partition partition_select(const MatrixXd& data, const PartitionOptions& opts = {}, Exec exec = Exec::Parallel);

/// Reorders columns to [y_m; y_l] per the partition.
TimeSeries apply_partition(const MatrixXd& data, const Partition& partition, std::uint64_t seed = 0);

/// Largest RMS residual of regressing each y_m channel on y_l at lags 0..order.
double relation_residual(const TimeSeries& data, int order);

}  // namespace lrdn
