#include "lrdn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrdn/error.hpp"

namespace lrdn {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json meta_json(const OutputMeta& meta) { return {{"config_hash", meta.config_hash}, {"seed", meta.seed}}; }

namespace {

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Accepts nested rows or a flat row-major list.
MatrixXd matrix_from_json(const json& j, Index rows, Index cols) {
  MatrixXd m(rows, cols);
  if (j.is_array() && static_cast<Index>(j.size()) == rows * cols && (rows * cols == 0 || j.front().is_number())) {
    for (Index k = 0; k < rows * cols; ++k) m(k / cols, k % cols) = j.at(static_cast<std::size_t>(k)).get<double>();
    return m;
  }
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) throw Error(ErrorCode::ParseError, "matrix row count");
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw Error(ErrorCode::ParseError, "matrix column count");
    for (Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

json to_json(const PolyMatrix& p) {
  json coeffs = json::array();
  for (const auto& c : p.coeffs()) coeffs.push_back(matrix_json(c));
  return {{"rows", p.rows()}, {"cols", p.cols()}, {"degree", p.degree()}, {"coeffs", std::move(coeffs)}};
}

PolyMatrix poly_from_json(const json& j) {
  return guarded([&] {
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto degree = j.at("degree").get<int>();
    const auto& coeffs = j.at("coeffs");
    if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != degree + 1) {
      throw Error(ErrorCode::ParseError, "coeffs must have degree + 1 entries");
    }
    PolyMatrix p(rows, cols, degree);
    for (int k = 0; k <= degree; ++k) p.coeff(k) = matrix_from_json(coeffs[static_cast<std::size_t>(k)], rows, cols);
    return p;
  });
}

json to_json(const LrdnModel& model) {
  return {{"m", model.m},
          {"l", model.l},
          {"g_ml", to_json(model.g_ml)},
          {"g_l", to_json(model.g_l)},
          {"sigma_l", std::vector<double>(model.sigma_l.data(), model.sigma_l.data() + model.sigma_l.size())}};
}

LrdnModel model_from_json(const json& j) {
  return guarded([&] {
    LrdnModel model;
    model.m = j.at("m").get<Index>();
    model.l = j.at("l").get<Index>();
    model.g_ml = poly_from_json(j.at("g_ml"));
    model.g_l = poly_from_json(j.at("g_l"));
    const auto sigma = j.at("sigma_l").get<std::vector<double>>();
    model.sigma_l = Eigen::Map<const VectorXd>(sigma.data(), static_cast<Index>(sigma.size()));
    return model;
  });
}

std::string model_hash(const LrdnModel& model) { return fnv1a_hex(to_json(model).dump()); }

json to_json(const ValidationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  return {{"ok", report.ok()}, {"checks", std::move(checks)}};
}

json to_json(const DirectedGraph& g) {
  json edges = json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back({{"target", i}, {"source", j}});
  return {{"num_nodes", g.num_nodes()}, {"m", g.m()}, {"l", g.l()}, {"edges", std::move(edges)}};
}

DirectedGraph graph_from_json(const json& j) {
  return guarded([&] {
    DirectedGraph g(j.at("m").get<Index>(), j.at("l").get<Index>());
    for (const auto& e : j.at("edges")) g.add_edge(e.at("target").get<Index>(), e.at("source").get<Index>());
    return g;
  });
}

std::string to_dot(const DirectedGraph& g, const OutputMeta* meta, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << "digraph lrdn {\n";
  if (meta) os << "  // config_hash=" << meta->config_hash << " seed=" << meta->seed << "\n";
  os << "  node [shape=circle, style=filled, fillcolor=\"lightblue\"];\n";
  for (Index k = 1; k <= g.num_nodes(); ++k) {
    const std::string label =
        static_cast<Index>(labels.size()) >= k ? labels[static_cast<std::size_t>(k - 1)] : std::to_string(k);
    os << "  " << k << " [label=\"" << label << "\"";
    if (g.in_vl(k)) os << ", block=\"l\", fillcolor=\"steelblue\"";
    os << "];\n";
  }
  for (const auto& [i, j] : g.edges()) os << "  " << j << " -> " << i << ";\n";
  os << "}\n";
  return os.str();
}

json to_json(const FilterEstimate& est) {
  auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"block", to_string(est.block)},
          {"order", est.order},
          {"m", est.m},
          {"l", est.l},
          {"ridge", est.ridge},
          {"coeffs", to_json(est.coeffs)},
          {"per_row_rss", vec(est.rss)},
          {"residual_variances", vec(est.residual_variance)}};
}

json to_json(const GraphMetrics& g) {
  return {{"true_positives", g.true_positives},
          {"false_positives", g.false_positives},
          {"false_negatives", g.false_negatives},
          {"precision", g.precision},
          {"recall", g.recall},
          {"precision_defined", g.precision_defined},
          {"recall_defined", g.recall_defined},
          {"exact_match", g.exact_match}};
}

json to_json(const Partition& p) {
  return {{"l_indices", p.l_indices},
          {"m_indices", p.m_indices},
          {"pivot_order", p.pivot_order},
          {"pivot_ratios", p.pivot_ratios},
          {"relation_ratio", p.relation_ratio},
          {"subsets_tried", p.subsets_tried},
          {"rank_gap", std::isfinite(p.rank_gap) ? json(p.rank_gap) : json("inf")}};
}

json to_json(const SpectralGrid& grid) {
  json out = json::array();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out.push_back({{"theta", grid.theta[j]},
                   {"re", matrix_json(grid.values[j].real())},
                   {"im", matrix_json(grid.values[j].imag())}});
  }
  return out;
}

std::string edge_tests_csv(const std::vector<EdgeTestResult>& tests) {
  std::ostringstream os;
  os << "source,target,F,p,norm,decision\n";
  char buf[256];
  for (const auto& t : tests) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g,%.17g,%d\n", static_cast<long long>(t.source),
                  static_cast<long long>(t.target), t.statistic, t.p_value, t.coeff_norm, t.decision ? 1 : 0);
    os << buf;
  }
  return os.str();
}

void write_csv(std::ostream& os, const MatrixXd& data) {
  os << "t";
  for (Index c = 0; c < data.cols(); ++c) os << ",y" << (c + 1);
  os << '\n';
  char buf[32];
  for (Index t = 0; t < data.rows(); ++t) {
    os << (t + 1);
    for (Index c = 0; c < data.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", data(t, c));
      os << buf;
    }
    os << '\n';
  }
}

MatrixXd read_csv(std::istream& is) {
  std::string line;
  // Leading '#' lines carry provenance comments.
  do {
    if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "empty CSV");
  } while (!line.empty() && line[0] == '#');
  Index cols = 0;
  for (char c : line) cols += c == ',';
  if (cols < 1) throw Error(ErrorCode::ParseError, "CSV header needs t and at least one channel");
  std::vector<double> values;
  Index rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string cell;
    Index n = 0;
    while (std::getline(ls, cell, ',')) {
      if (n > 0) {
        try {
          values.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw Error(ErrorCode::ParseError, "bad number '" + cell + "' on data row " + std::to_string(rows + 1));
        }
      }
      ++n;
    }
    if (n != cols + 1) throw Error(ErrorCode::ParseError, "row " + std::to_string(rows + 1) + " has wrong width");
    ++rows;
  }
  MatrixXd out(rows, cols);
  for (Index t = 0; t < rows; ++t) {
    for (Index c = 0; c < cols; ++c) out(t, c) = values[static_cast<std::size_t>(t * cols + c)];
  }
  return out;
}

json series_meta(const TimeSeries& ts, const std::string& hash) {
  return {{"m", ts.m}, {"l", ts.l}, {"T", ts.num_samples()}, {"burn_in", ts.burn_in}, {"seed", ts.seed},
          {"model_hash", hash}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace lrdn
