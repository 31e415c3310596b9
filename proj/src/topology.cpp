#include "lrdn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/QR>
#include <boost/math/distributions/fisher_f.hpp>

#include "lrdn/error.hpp"

namespace lrdn {

namespace {

double f_upper_tail(double f, double df1, double df2) {
  if (!(f > 0.0)) return 1.0;
  if (!std::isfinite(f)) return 0.0;
  const boost::math::fisher_f_distribution<double> dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

}  // namespace

EdgeTestResult edge_test(const FilterEstimate& est, const TimeSeries& data, Index target, Index source,
                         const EdgeTestOptions& opts) {
  check_series(data);
  if (data.m != est.m || data.l != est.l || data.num_samples() - est.order != est.effective_samples()) {
    throw Error(ErrorCode::ShapeMismatch, "estimate was not fitted on this data");
  }
  const Index m = est.m;
  const Index l = est.l;
  if (source <= m || source > m + l) throw Error(ErrorCode::IndexOutOfRange, "source must be in V_l");
  Index row = 0;
  if (est.block == Block::M) {
    if (target < 1 || target > m) throw Error(ErrorCode::IndexOutOfRange, "H target must be in 1..m");
    row = target - 1;
  } else {
    if (target <= m || target > m + l) throw Error(ErrorCode::IndexOutOfRange, "S target must be in V_l");
    row = target - m - 1;
  }
  const Index src = source - m - 1;
  const auto& group = est.groups[static_cast<std::size_t>(row)][static_cast<std::size_t>(src)];
  const auto& full_cols = est.design[static_cast<std::size_t>(row)];

  EdgeTestResult res;
  res.target = target;
  res.source = source;
  res.df1 = static_cast<Index>(group.size());
  res.df2 = est.effective_samples() - static_cast<Index>(full_cols.size());
  if (group.empty() || res.df2 < 1) {
    throw Error(ErrorCode::DegenerateRestriction, "no regressors to test for (" + std::to_string(target) + ", " +
                                                      std::to_string(source) + ")");
  }
  res.coeff_norm = est.group_coefficients(row, src).norm();

  const double rss_full = est.rss(row);
  const double energy = est.target_energy(row);
  if (est.block == Block::M && rss_full <= opts.deterministic_tol * opts.deterministic_tol * energy) {
    // Exact relation: the F ratio is 0/0, decide on the coefficient group.
    res.deterministic = true;
    res.decision = res.coeff_norm > opts.h_norm_threshold;
    res.statistic = res.decision ? std::numeric_limits<double>::infinity() : 0.0;
    res.p_value = res.decision ? 0.0 : 1.0;
    return res;
  }

  std::vector<Regressor> restricted;
  for (std::size_t c = 0; c < full_cols.size(); ++c) {
    if (std::find(group.begin(), group.end(), static_cast<Index>(c)) == group.end()) restricted.push_back(full_cols[c]);
  }
  const MatrixXd source_block = data.y_l();
  const MatrixXd target_block = est.block == Block::M ? MatrixXd(data.y_m()) : source_block;
  const VectorXd y = target_block.col(row).tail(est.effective_samples());
  LsFit fit;
  try {
    fit = fit_least_squares(lag_design(source_block, restricted, est.order), y, {est.ridge, kDefaultConditionBound});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficientDesign) throw;
    throw Error(ErrorCode::DegenerateRestriction, e.what());
  }
  const double increase = std::max(0.0, fit.rss - rss_full);
  const double denom = rss_full / static_cast<double>(res.df2);
  res.statistic = denom > 0.0 ? (increase / static_cast<double>(res.df1)) / denom
                              : (increase > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  res.p_value = f_upper_tail(res.statistic, static_cast<double>(res.df1), static_cast<double>(res.df2));
  res.decision = res.p_value < opts.alpha;
  return res;
}

double rss_increase_wald(const FilterEstimate& est, Index row, Index source_channel) {
  const VectorXd beta = est.group_coefficients(row, source_channel);
  const MatrixXd block = est.gram_inverse_block(row, source_channel);
  return beta.dot(block.ldlt().solve(beta));
}

NetworkEstimate estimate_network(const TimeSeries& data, const EstimateOptions& opts, Exec exec) {
  NetworkEstimate out{std::nullopt, estimate_s(data, opts, exec)};
  if (data.m > 0) out.h = estimate_h(data, opts, exec);
  return out;
}

Decision decide_graph(const NetworkEstimate& est, const TimeSeries& data, const EdgeTestOptions& opts,
                      Correction correction, Exec exec) {
  check_series(data);
  const Index m = data.m;
  const Index l = data.l;
  if (m > 0 && !est.h) throw Error(ErrorCode::InvalidConfig, "H estimate required when m > 0");

  EdgeTestOptions local = opts;
  if (correction == Correction::Bonferroni) local.alpha = opts.alpha / static_cast<double>((m + l) * l);

  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 1; i <= m + l; ++i) {
    for (Index j = m + 1; j <= m + l; ++j) pairs.emplace_back(i, j);
  }
  Decision out;
  out.graph = DirectedGraph(m, l);
  out.alpha_used = local.alpha;
  out.tests.resize(pairs.size());
  for_each_index(exec, pairs.size(), [&](std::size_t n) {
    const auto [i, j] = pairs[n];
    out.tests[n] = edge_test(i <= m ? *est.h : est.s, data, i, j, local);
  });
  for (const auto& t : out.tests) {
    if (t.decision) out.graph.add_edge(t.target, t.source);
  }
  return out;
}

Decision decide_graph(const FilterEstimate& h_est, const FilterEstimate& s_est, const TimeSeries& data,
                      const EdgeTestOptions& opts, Correction correction, Exec exec) {
  return decide_graph(NetworkEstimate{h_est, s_est}, data, opts, correction, exec);
}

DirectedGraph population_graph(const ExactFilters& filters, Index m, double zero_tol) {
  const BoolMatrix sml = m > 0 ? support(filters.h, zero_tol) : BoolMatrix(0, filters.s.cols());
  return graph_from_supports(sml, support(filters.s, zero_tol));
}

GraphMetrics compare_graphs(const DirectedGraph& estimated, const DirectedGraph& truth) {
  if (estimated.num_nodes() != truth.num_nodes() || estimated.m() != truth.m()) {
    throw Error(ErrorCode::ShapeMismatch, "graphs have different node sets");
  }
  GraphMetrics g;
  for (const auto& e : estimated.edges()) {
    if (truth.edges().count(e)) {
      ++g.true_positives;
    } else {
      ++g.false_positives;
    }
  }
  g.false_negatives = truth.num_edges() - g.true_positives;
  g.precision_defined = estimated.num_edges() > 0;
  g.recall_defined = truth.num_edges() > 0;
  g.precision = g.precision_defined ? static_cast<double>(g.true_positives) / static_cast<double>(estimated.num_edges()) : 1.0;
  g.recall = g.recall_defined ? static_cast<double>(g.true_positives) / static_cast<double>(truth.num_edges()) : 1.0;
  g.exact_match = g.false_positives == 0 && g.false_negatives == 0;
  return g;
}

bool corollary1_check(const LrdnModel& model, const InverseOptions& opts, double zero_tol) {
  const auto rf = reduced_form(model, opts);
  const auto winv = truncated_inverse(rf.w_factor, opts);
  const auto filters = exact_filters(model);
  BoolMatrix a = support(winv.inverse, zero_tol);
  BoolMatrix b = support(filters.s, zero_tol);
  a.diagonal().setConstant(false);
  b.diagonal().setConstant(false);
  return a == b;
}

namespace {
constexpr std::size_t kMaxPartitionSubsets = 200000;
}

Partition partition_select(const MatrixXd& data, const PartitionOptions& opts, Exec exec) {
  const Index n = data.cols();
  const Index q = opts.max_lag;
  if (n < 1) throw Error(ErrorCode::ShapeMismatch, "no channels");
  if (q < 0 || !(opts.rank_tol > 0.0) || !(opts.gap >= 1.0)) throw Error(ErrorCode::InvalidConfig, "bad partition options");
  if (data.rows() <= 10 * std::max<Index>(q, 1) * n) {
    throw Error(ErrorCode::InsufficientData, "partition selection needs T > 10 q n");
  }

  const Index rows = data.rows() - q;
  std::vector<Regressor> past;
  for (Index c = 0; c < n; ++c) {
    for (int k = 1; k <= q; ++k) past.push_back({c, k});
  }
  const MatrixXd x = lag_design(data, past, q);
  MatrixXd resid(rows, n);
  VectorXd energy(n);
  for_each_index(exec, static_cast<std::size_t>(n), [&](std::size_t c) {
    const auto col = static_cast<Index>(c);
    const VectorXd y = data.col(col).tail(rows);
    energy(col) = y.squaredNorm();
    resid.col(col) = projection_residual(x, y);
  });

  Partition part;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<double> ratio(static_cast<std::size_t>(n));
  auto refresh = [&] {
    for (Index c = 0; c < n; ++c) {
      ratio[static_cast<std::size_t>(c)] = energy(c) > 0.0 ? resid.col(c).squaredNorm() / energy(c) : 0.0;
    }
  };
  refresh();
  const std::vector<double> ratio0 = ratio;
  const double band_lo = opts.rank_tol / std::sqrt(opts.gap);
  const double band_hi = opts.rank_tol * std::sqrt(opts.gap);
  for (;;) {
    Index pick = -1;
    double best = -1.0;
    for (Index c = 0; c < n; ++c) {
      if (taken[static_cast<std::size_t>(c)] || ratio[static_cast<std::size_t>(c)] < opts.rank_tol) continue;
      const double e = resid.col(c).squaredNorm();
      if (e > best) {
        best = e;
        pick = c;
      }
    }
    if (pick < 0) break;
    taken[static_cast<std::size_t>(pick)] = true;
    part.pivot_order.push_back(pick + 1);
    part.pivot_ratios.push_back(ratio[static_cast<std::size_t>(pick)]);
    const VectorXd u = resid.col(pick).normalized();
    for (Index c = 0; c < n; ++c) {
      if (!taken[static_cast<std::size_t>(c)]) resid.col(c) -= u.dot(resid.col(c)) * u;
    }
    refresh();
  }

  double min_kept = std::numeric_limits<double>::infinity();
  double max_dropped = 0.0;
  for (double r : part.pivot_ratios) min_kept = std::min(min_kept, r);
  for (Index c = 0; c < n; ++c) {
    const auto k = static_cast<std::size_t>(c);
    const double r = taken[k] ? part.pivot_ratios[static_cast<std::size_t>(
                                    std::find(part.pivot_order.begin(), part.pivot_order.end(), c + 1) -
                                    part.pivot_order.begin())]
                              : ratio[k];
    if (!taken[k]) max_dropped = std::max(max_dropped, r);
    if (r >= band_lo && r <= band_hi) {
      throw Error(ErrorCode::AmbiguousRank, "channel " + std::to_string(c + 1) + " has innovation ratio " +
                                                std::to_string(r) + " inside the rank gap band");
    }
  }
  if (part.pivot_order.empty()) throw Error(ErrorCode::AmbiguousRank, "no channel carries innovation");
  part.rank_gap = max_dropped > 0.0 ? min_kept / max_dropped : std::numeric_limits<double>::infinity();

  // The pivots fix the rank but not which channels to keep: a y_m channel can
  // carry innovation too, and a y_l channel can be an exact FIR image of
  // y_m channels. Size-l subsets are tried in preference order (pivots
  // first, then by innovation energy, then lowest index) and the first one
  // that explains every other channel through lags 0..q is taken. Exact
  // relations hold row by row, so a few times more rows than regressors is
  // enough to tell them apart from noise.
  std::vector<Index> rank(part.pivot_order.size());
  std::transform(part.pivot_order.begin(), part.pivot_order.end(), rank.begin(), [](Index i) { return i - 1; });
  std::vector<Index> rest;
  for (Index c = 0; c < n; ++c) {
    if (!taken[static_cast<std::size_t>(c)]) rest.push_back(c);
  }
  std::stable_sort(rest.begin(), rest.end(), [&](Index a, Index b) { 
    return energy(a) * ratio0[static_cast<std::size_t>(a)] > energy(b) * ratio0[static_cast<std::size_t>(b)];
  });
  rank.insert(rank.end(), rest.begin(), rest.end());

  const auto l = static_cast<Index>(part.pivot_order.size());
  const Index rel_rows = std::min<Index>(rows, std::max<Index>(4 * l * (q + 1), 200));
  const MatrixXd window = data.topRows(q + rel_rows);
  auto worst_residual = [&](const std::vector<Index>& basis) {
    std::vector<Regressor> cols;
    for (Index b : basis) {
      for (int k = 0; k <= q; ++k) cols.push_back({b, k});
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(lag_design(window, cols, q));
    double worst = 0.0;
    for (Index t = 0; t < n; ++t) {
      if (std::find(basis.begin(), basis.end(), t) != basis.end()) continue;
      const VectorXd y = window.col(t).tail(rel_rows);
      const double e = y.squaredNorm();
      if (e <= 0.0) continue;
      VectorXd qty = qr.householderQ().transpose() * y;
      qty.head(qr.rank()).setZero();
      worst = std::max(worst, qty.squaredNorm() / e);
      if (worst >= band_lo) break;
    }
    return worst;
  };

  // Lexicographic walk over positions in the preference ranking.
  std::vector<Index> pos(static_cast<std::size_t>(l));
  std::iota(pos.begin(), pos.end(), Index{0});
  for (std::size_t tried = 0;; ++tried) {
    if (tried == kMaxPartitionSubsets) {
      throw Error(ErrorCode::AmbiguousRank, "no valid channel subset within the search budget");
    }
    std::vector<Index> basis;
    for (Index p : pos) basis.push_back(rank[static_cast<std::size_t>(p)]);
    const double worst = worst_residual(basis);
    if (worst < band_lo) {
      part.relation_ratio = worst;
      part.subsets_tried = tried + 1;
      std::sort(basis.begin(), basis.end());
      for (Index c : basis) part.l_indices.push_back(c + 1);
      for (Index c = 0; c < n; ++c) {
        if (!std::binary_search(basis.begin(), basis.end(), c)) part.m_indices.push_back(c + 1);
      }
      break;
    }
    Index i = l - 1;
    while (i >= 0 && pos[static_cast<std::size_t>(i)] == n - l + i) --i;
    if (i < 0) throw Error(ErrorCode::AmbiguousRank, "no channel subset of size " + std::to_string(l) +
                                                         " explains the others exactly");
    ++pos[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < l; ++j) pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
  }
  return part;
}

TimeSeries apply_partition(const MatrixXd& data, const Partition& partition, std::uint64_t seed) {
  TimeSeries ts;
  ts.m = partition.m();
  ts.l = partition.l();
  ts.seed = seed;
  if (ts.m + ts.l != data.cols()) throw Error(ErrorCode::ShapeMismatch, "partition does not cover all channels");
  ts.data.resize(data.rows(), data.cols());
  Index c = 0;
  for (Index idx : partition.m_indices) ts.data.col(c++) = data.col(idx - 1);
  for (Index idx : partition.l_indices) ts.data.col(c++) = data.col(idx - 1);
  return ts;
}

double relation_residual(const TimeSeries& data, int order) {
  check_series(data);
  if (data.m == 0) return 0.0;
  const MatrixXd source = data.y_l();
  const auto cols = h_design(data.l, order);
  const MatrixXd x = lag_design(source, cols, order);
  const Index rows = x.rows();
  double worst = 0.0;
  for (Index i = 0; i < data.m; ++i) {
    const VectorXd y = data.data.col(i).tail(rows);
    const VectorXd r = projection_residual(x, y);
    worst = std::max(worst, std::sqrt(r.squaredNorm() / static_cast<double>(rows)));
  }
  return worst;
}

}  // namespace lrdn
