#pragma once

// Low-rank dynamical network model:
//   y_m(t) = G_ml(z) y_l(t)
//   y_l(t) = w_l(t) + G_l(z) y_l(t),   w_l white with diagonal covariance.
// Nodes are numbered 1..m+l with V_l = {m+1, ..., m+l}; the edge (i, j)
// means node j drives node i.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lrdn/polymat.hpp"

namespace lrdn {

struct LrdnModel {
  Index m = 0;
  Index l = 1;
  PolyMatrix g_ml{0, 1};
  PolyMatrix g_l{1, 1};
  VectorXd sigma_l;  ///< diagonal of the noise covariance (variances)

  Index num_nodes() const { return m + l; }
};

struct ValidationOptions {
  int horizon = kDefaultHorizon;
  double decay_tol = kDefaultDecayTol;
  double condition_bound = kDefaultConditionBound;
  double unit_diagonal_tol = 1e-12;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;      ///< measured quantity
  double threshold = 0.0;  ///< limit it was compared against
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* find(const std::string& name) const;
  std::string to_string() const;
};

/// Checks, in order: shapes, strictly causal diagonal of G_l(inf), conditioning
/// of I - G_l(inf), unit diagonal of (I - G_l(inf))^-1, decay of the truncated
/// inverse of I - G_l, positive noise variances. Never throws; later checks are
/// skipped (reported as failed) when an earlier one makes them meaningless.
ValidationReport validate(const LrdnModel& model, const ValidationOptions& opts = {});

/// Throws InvalidModel carrying the report text when validation fails.
void require_valid(const LrdnModel& model, const ValidationOptions& opts = {});

class DirectedGraph {
 public:
  using Edge = std::pair<Index, Index>;  ///< (target i, source j), 1-based

  DirectedGraph(Index m, Index l);

  /// Throws IndexOutOfRange unless i in V and j in V_l.
  void add_edge(Index target, Index source);
  bool has_edge(Index target, Index source) const { return edges_.count({target, source}) != 0; }

  Index m() const { return m_; }
  Index l() const { return l_; }
  Index num_nodes() const { return m_ + l_; }
  bool in_vl(Index node) const { return node > m_ && node <= m_ + l_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::set<Edge>& edges() const { return edges_; }

  bool operator==(const DirectedGraph& other) const = default;

 private:
  Index m_;
  Index l_;
  std::set<Edge> edges_;
};

/// Graph from an m x l support of G_ml and an l x l support of G_l.
DirectedGraph graph_from_supports(const BoolMatrix& support_ml, const BoolMatrix& support_l);

DirectedGraph true_graph(const LrdnModel& model, double zero_tol = kDefaultZeroTol);

struct GeneratorConfig {
  Index m = 8;
  Index l = 4;
  int degree_ml = 2;
  int degree_l = 2;
  /// Explicit masks take precedence over the edge counts.
  std::optional<BoolMatrix> support_ml;
  std::optional<BoolMatrix> support_l;
  int edges_ml = 17;
  int edges_l = 8;
  double coeff_min = 0.3;
  double coeff_max = 0.6;
  /// Distinct lags carrying a nonzero coefficient in every supported entry.
  int lags_per_entry = 1;
  /// Allow off-diagonal lag-0 terms in G_l. They are drawn along a random
  /// acyclic order so that (I - G_l(inf))^-1 keeps a unit diagonal.
  bool include_lag0_offdiag = false;
  /// 1-based y_l channels pinned to pure noise (no in-edges, no self-loop).
  std::vector<Index> pinned_noise;
  /// Noise variances; empty means all ones.
  VectorXd sigma_l;
  int max_rejections = 1000;
  std::uint64_t rng_seed = 1;
  ValidationOptions validation;
};

/// Throws InvalidConfig describing the first problem found.
void check_config(const GeneratorConfig& config);

/// Seeded random model honoring the requested support exactly. Coefficient
/// values (and, when supports are given as counts, the supports) are redrawn
/// until the model validates; GenerationFailed after max_rejections draws.
LrdnModel random_model(const GeneratorConfig& config);

struct ReducedForm {
  PolyMatrix w_factor;       ///< (I - G_l)^-1 truncated at the horizon, l x l
  PolyMatrix full_transfer;  ///< [G_ml W; W], (m + l) x l
  double tail_norm = 0.0;
};

/// y_l = W w_l and y = [G_ml W; W] w_l. Propagates NoDecay.
ReducedForm reduced_form(const LrdnModel& model, const InverseOptions& opts = {});

}  // namespace lrdn
