#pragma once

// JSON, CSV and DOT formats for every exported type.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrdn/model.hpp"
#include "lrdn/sim.hpp"
#include "lrdn/spectral.hpp"
#include "lrdn/topology.hpp"

namespace lrdn {

using nlohmann::json;

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Provenance attached to every written file.
struct OutputMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
};

json meta_json(const OutputMeta& meta);

// {rows, cols, degree, coeffs: [[[row], ...], ...]}
json to_json(const PolyMatrix& p);
PolyMatrix poly_from_json(const json& j);

// {m, l, g_ml, g_l, sigma_l}
json to_json(const LrdnModel& model);
LrdnModel model_from_json(const json& j);
/// Hash of the canonical model JSON.
std::string model_hash(const LrdnModel& model);

json to_json(const ValidationReport& report);

// {num_nodes, m, l, edges: [{target, source}, ...]}
json to_json(const DirectedGraph& g);
DirectedGraph graph_from_json(const json& j);
/// V_l nodes carry block="l" and a darker fill. `labels` optionally maps node
/// k (1-based) to a display label.
std::string to_dot(const DirectedGraph& g, const OutputMeta* meta = nullptr,
                   const std::vector<std::string>& labels = {});

// {block, order, coeffs, per_row_rss, residual_variances}
json to_json(const FilterEstimate& est);

json to_json(const GraphMetrics& metrics);
json to_json(const Partition& partition);
/// [{theta, re: [[...]], im: [[...]]}, ...]
json to_json(const SpectralGrid& grid);

/// source,target,F,p,norm,decision
std::string edge_tests_csv(const std::vector<EdgeTestResult>& tests);

/// Header "t,y1,...,y{n}", one row per sample, 17 significant digits.
void write_csv(std::ostream& os, const MatrixXd& data);
MatrixXd read_csv(std::istream& is);

/// {m, l, T, burn_in, seed, model_hash}
json series_meta(const TimeSeries& ts, const std::string& model_hash);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace lrdn
