#include "lrdn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "lrdn/error.hpp"

namespace lrdn {

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " threshold=" << c.threshold;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << '\n';
  }
  return os.str();
}

ValidationReport validate(const LrdnModel& model, const ValidationOptions& opts) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, double value, double threshold, std::string detail = {}) {
    report.checks.push_back({std::move(name), passed, value, threshold, std::move(detail)});
  };
  const double inf = std::numeric_limits<double>::infinity();

  const bool shapes = model.l >= 1 && model.m >= 0 && model.g_ml.rows() == model.m &&
                      model.g_ml.cols() == model.l && model.g_l.rows() == model.l &&
                      model.g_l.cols() == model.l && model.sigma_l.size() == model.l;
  add("shapes", shapes, 0.0, 0.0, shapes ? "" : "g_ml, g_l or sigma_l inconsistent with (m, l)");
  if (!shapes) {
    for (const char* name : {"strictly_causal_diagonal", "leading_condition", "unit_leading_diagonal",
                             "inverse_decay", "sigma_positive"}) {
      add(name, false, inf, 0.0, "skipped");
    }
    return report;
  }

  const MatrixXd& g0 = model.g_l.coeff(0);
  const double diag0 = g0.diagonal().cwiseAbs().maxCoeff();
  add("strictly_causal_diagonal", diag0 == 0.0, diag0, 0.0);

  const MatrixXd lead = MatrixXd::Identity(model.l, model.l) - g0;
  Eigen::JacobiSVD<MatrixXd> svd(lead);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : inf;
  const bool well_posed = cond < opts.condition_bound;
  add("leading_condition", well_posed, cond, opts.condition_bound);

  if (well_posed) {
    const MatrixXd w0 = lead.inverse();
    const double dev = (w0.diagonal().array() - 1.0).abs().maxCoeff();
    add("unit_leading_diagonal", dev <= opts.unit_diagonal_tol, dev, opts.unit_diagonal_tol,
        "diag((I - G_l(inf))^-1) must be 1");
    const auto inv = truncated_inverse_unchecked(PolyMatrix::identity(model.l) - model.g_l,
                                                 {opts.horizon, opts.decay_tol, opts.condition_bound});
    const bool decays = std::isfinite(inv.tail_norm) && inv.tail_norm <= opts.decay_tol;
    add("inverse_decay", decays, inv.tail_norm, opts.decay_tol,
        "horizon " + std::to_string(opts.horizon));
  } else {
    add("unit_leading_diagonal", false, inf, opts.unit_diagonal_tol, "skipped");
    add("inverse_decay", false, inf, opts.decay_tol, "skipped");
  }

  const double smin = model.sigma_l.minCoeff();
  add("sigma_positive", smin > 0.0, smin, 0.0);
  return report;
}

void require_valid(const LrdnModel& model, const ValidationOptions& opts) {
  const auto report = validate(model, opts);
  if (!report.ok()) throw Error(ErrorCode::InvalidModel, "\n" + report.to_string());
}

DirectedGraph::DirectedGraph(Index m, Index l) : m_(m), l_(l) {
  if (m < 0 || l < 1) throw Error(ErrorCode::ShapeMismatch, "graph needs m >= 0 and l >= 1");
}

void DirectedGraph::add_edge(Index target, Index source) {
  if (target < 1 || target > num_nodes()) {
    throw Error(ErrorCode::IndexOutOfRange, "edge target " + std::to_string(target) + " not a node");
  }
  if (!in_vl(source)) {
    throw Error(ErrorCode::IndexOutOfRange, "edge source " + std::to_string(source) + " not in V_l");
  }
  edges_.insert({target, source});
}

DirectedGraph graph_from_supports(const BoolMatrix& support_ml, const BoolMatrix& support_l) {
  const Index m = support_ml.rows();
  const Index l = support_l.rows();
  if (support_l.cols() != l || (m > 0 && support_ml.cols() != l)) {
    throw Error(ErrorCode::ShapeMismatch, "support shapes inconsistent");
  }
  DirectedGraph g(m, l);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < l; ++j) {
      if (support_ml(i, j)) g.add_edge(i + 1, m + j + 1);
    }
  }
  for (Index i = 0; i < l; ++i) {
    for (Index j = 0; j < l; ++j) {
      if (support_l(i, j)) g.add_edge(m + i + 1, m + j + 1);
    }
  }
  return g;
}

DirectedGraph true_graph(const LrdnModel& model, double zero_tol) {
  return graph_from_supports(support(model.g_ml, zero_tol), support(model.g_l, zero_tol));
}

void check_config(const GeneratorConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (c.m < 0 || c.l < 1) fail("need m >= 0 and l >= 1");
  if (c.degree_ml < 0 || c.degree_l < 0) fail("degrees must be nonnegative");
  if (!(c.coeff_min > 0.0) || !(c.coeff_max >= c.coeff_min)) fail("need 0 < coeff_min <= coeff_max");
  if (c.lags_per_entry < 1) fail("lags_per_entry must be >= 1");
  if (c.max_rejections < 1) fail("max_rejections must be >= 1");
  if (c.sigma_l.size() != 0 && (c.sigma_l.size() != c.l || !(c.sigma_l.minCoeff() > 0.0))) {
    fail("sigma_l must have l positive entries");
  }
  for (Index p : c.pinned_noise) {
    if (p < 1 || p > c.l) fail("pinned_noise index out of range");
  }
  if (c.support_ml && (c.support_ml->rows() != c.m || c.support_ml->cols() != c.l)) fail("support_ml must be m x l");
  if (c.support_l) {
    if (c.support_l->rows() != c.l || c.support_l->cols() != c.l) fail("support_l must be l x l");
    for (Index p : c.pinned_noise) {
      if (c.support_l->row(p - 1).any()) fail("pinned channel has in-edges in support_l");
    }
    for (Index i = 0; i < c.l; ++i) {
      if ((*c.support_l)(i, i) && c.degree_l < 1) fail("self-loops need degree_l >= 1");
    }
    if (c.support_l->any() && c.degree_l < 1 && !c.include_lag0_offdiag) fail("G_l support needs degree_l >= 1");
  } else {
    const Index pinned = static_cast<Index>(c.pinned_noise.size());
    const Index candidates = (c.l - pinned) * c.l;
    if (c.edges_l < 0 || c.edges_l > candidates) fail("edges_l exceeds available pairs");
    if (c.edges_l > 0 && c.degree_l < 1) fail("G_l edges need degree_l >= 1");
  }
  if (!c.support_ml && (c.edges_ml < 0 || c.edges_ml > c.m * c.l)) fail("edges_ml exceeds m * l");
}

namespace {

using Rng = std::mt19937_64;

BoolMatrix draw_support_l(const GeneratorConfig& c, Rng& rng) {
  BoolMatrix s = BoolMatrix::Constant(c.l, c.l, false);
  std::vector<std::pair<Index, Index>> candidates;
  for (Index i = 0; i < c.l; ++i) {
    if (std::find(c.pinned_noise.begin(), c.pinned_noise.end(), i + 1) != c.pinned_noise.end()) continue;
    for (Index j = 0; j < c.l; ++j) candidates.emplace_back(i, j);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  for (int e = 0; e < c.edges_l; ++e) s(candidates[e].first, candidates[e].second) = true;
  return s;
}

// Every y_m row gets at least one source when there are enough edges, so no
// deterministic channel is identically zero.
BoolMatrix draw_support_ml(const GeneratorConfig& c, Rng& rng) {
  BoolMatrix s = BoolMatrix::Constant(c.m, c.l, false);
  int placed = 0;
  if (c.edges_ml >= c.m) {
    std::uniform_int_distribution<Index> col(0, c.l - 1);
    for (Index i = 0; i < c.m; ++i) {
      s(i, col(rng)) = true;
      ++placed;
    }
  }
  std::vector<std::pair<Index, Index>> candidates;
  for (Index i = 0; i < c.m; ++i) {
    for (Index j = 0; j < c.l; ++j) {
      if (!s(i, j)) candidates.emplace_back(i, j);
    }
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  for (std::size_t e = 0; placed < c.edges_ml; ++e, ++placed) s(candidates[e].first, candidates[e].second) = true;
  return s;
}

// Writes coefficients for one supported entry on the given allowed lags.
void fill_entry(PolyMatrix& p, Index i, Index j, std::vector<int> lags, const GeneratorConfig& c, Rng& rng) {
  std::shuffle(lags.begin(), lags.end(), rng);
  const std::size_t count = std::min<std::size_t>(lags.size(), static_cast<std::size_t>(c.lags_per_entry));
  std::uniform_real_distribution<double> mag(c.coeff_min, c.coeff_max);
  std::bernoulli_distribution negative(0.5);
  for (std::size_t n = 0; n < count; ++n) {
    const double v = mag(rng);
    p.coeff(lags[n])(i, j) = negative(rng) ? -v : v;
  }
}

std::vector<int> lag_range(int first, int last) {
  std::vector<int> out;
  for (int k = first; k <= last; ++k) out.push_back(k);
  return out;
}

// Returns std::nullopt when the draw cannot honor the support (lag-0 only
// entries that would close a contemporaneous cycle).
std::optional<LrdnModel> draw_model(const GeneratorConfig& c, const BoolMatrix& sml, const BoolMatrix& sl, Rng& rng) {
  LrdnModel model;
  model.m = c.m;
  model.l = c.l;
  model.g_ml = PolyMatrix(c.m, c.l, c.degree_ml);
  model.g_l = PolyMatrix(c.l, c.l, c.degree_l);
  model.sigma_l = c.sigma_l.size() == c.l ? c.sigma_l : VectorXd::Ones(c.l);

  std::vector<Index> order(static_cast<std::size_t>(c.l));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Index> rank(static_cast<std::size_t>(c.l));
  for (Index r = 0; r < c.l; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;

  for (Index i = 0; i < c.l; ++i) {
    for (Index j = 0; j < c.l; ++j) {
      if (!sl(i, j)) continue;
      const bool lag0 = c.include_lag0_offdiag && i != j && rank[static_cast<std::size_t>(j)] < rank[static_cast<std::size_t>(i)];
      auto lags = lag_range(lag0 ? 0 : 1, c.degree_l);
      if (lags.empty()) return std::nullopt;
      fill_entry(model.g_l, i, j, std::move(lags), c, rng);
    }
  }
  for (Index i = 0; i < c.m; ++i) {
    for (Index j = 0; j < c.l; ++j) {
      if (sml(i, j)) fill_entry(model.g_ml, i, j, lag_range(0, c.degree_ml), c, rng);
    }
  }
  return model;
}

}  // namespace

LrdnModel random_model(const GeneratorConfig& c) {
  check_config(c);
  Rng rng(c.rng_seed);
  for (int attempt = 0; attempt < c.max_rejections; ++attempt) {
    const BoolMatrix sl = c.support_l ? *c.support_l : draw_support_l(c, rng);
    const BoolMatrix sml = c.support_ml ? *c.support_ml : draw_support_ml(c, rng);
    auto model = draw_model(c, sml, sl, rng);
    if (model && validate(*model, c.validation).ok()) return *std::move(model);
  }
  throw Error(ErrorCode::GenerationFailed,
              "no stable model after " + std::to_string(c.max_rejections) + " draws");
}

ReducedForm reduced_form(const LrdnModel& model, const InverseOptions& opts) {
  auto inv = truncated_inverse(PolyMatrix::identity(model.l) - model.g_l, opts);
  PolyMatrix full = vstack(model.g_ml * inv.inverse, inv.inverse);
  return {std::move(inv.inverse), std::move(full), inv.tail_norm};
}

}  // namespace lrdn
