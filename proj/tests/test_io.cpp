#include <doctest.h>

#include <sstream>

#include "lrdn/error.hpp"
#include "lrdn/io.hpp"
#include "support.hpp"

using namespace lrdn;

TEST_CASE("polynomial JSON round trip") {
  std::mt19937_64 rng(1);
  const PolyMatrix p = test::random_poly(2, 3, 2, rng);
  const json j = to_json(p);
  CHECK(j.at("rows") == 2);
  CHECK(j.at("cols") == 3);
  CHECK(j.at("degree") == 2);
  CHECK(j.at("coeffs").size() == 3);
  CHECK(max_abs_diff(poly_from_json(j), p) == 0.0);
  CHECK(max_abs_diff(poly_from_json(json::parse(j.dump())), p) == 0.0);

  json flat = j;
  flat["coeffs"] = json::array();
  for (int k = 0; k <= 2; ++k) {
    json rows = json::array();
    for (Index r = 0; r < 2; ++r) {
      for (Index c = 0; c < 3; ++c) rows.push_back(p.coeff(k)(r, c));
    }
    flat["coeffs"].push_back(rows);
  }
  CHECK(max_abs_diff(poly_from_json(flat), p) == 0.0);

  json bad = j;
  bad["degree"] = 5;
  CHECK_THROWS_AS(poly_from_json(bad), Error);
}

TEST_CASE("model and graph JSON round trips") {
  GeneratorConfig c;
  c.pinned_noise = {4};
  const auto model = random_model(c);
  const auto back = model_from_json(json::parse(to_json(model).dump()));
  CHECK(back.m == 8);
  CHECK(back.l == 4);
  CHECK(max_abs_diff(back.g_ml, model.g_ml) == 0.0);
  CHECK(max_abs_diff(back.g_l, model.g_l) == 0.0);
  CHECK(back.sigma_l == model.sigma_l);
  CHECK(model_hash(back) == model_hash(model));

  const auto g = true_graph(model);
  CHECK(graph_from_json(json::parse(to_json(g).dump())) == g);
  CHECK_THROWS_AS(model_from_json(json{{"m", 1}}), Error);
}

TEST_CASE("DOT export") {
  DirectedGraph g(1, 2);
  g.add_edge(1, 2);
  g.add_edge(3, 3);
  const OutputMeta meta{"abc", 7};
  const std::string dot = to_dot(g, &meta);
  CHECK(dot.find("digraph") == 0);
  CHECK(dot.find("config_hash=abc seed=7") != std::string::npos);
  CHECK(dot.find("2 -> 1;") != std::string::npos);
  CHECK(dot.find("3 -> 3;") != std::string::npos);
  CHECK(dot.find("1 [label=\"1\"];") != std::string::npos);
  CHECK(dot.find("2 [label=\"2\", block=\"l\"") != std::string::npos);
}

TEST_CASE("CSV round trip is exact") {
  const auto ts = simulate(random_model(test::small_config(2)), 50, 10, 3);
  std::ostringstream os;
  write_csv(os, ts.data);
  const std::string text = os.str();
  CHECK(text.rfind("t,y1,y2,y3,y4,y5,y6\n1,", 0) == 0);
  std::istringstream is(text);
  CHECK(read_csv(is) == ts.data);

  std::istringstream commented("# note\n" + text);
  CHECK(read_csv(commented) == ts.data);
}

TEST_CASE("CSV errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), Error);
  std::istringstream ragged("t,y1,y2\n1,0.5\n");
  CHECK_THROWS_WITH_AS(read_csv(ragged), doctest::Contains("ParseError"), Error);
  std::istringstream garbage("t,y1\n1,abc\n");
  CHECK_THROWS_AS(read_csv(garbage), Error);
}

TEST_CASE("edge test CSV") {
  EdgeTestResult r;
  r.target = 2;
  r.source = 3;
  r.statistic = 4.5;
  r.p_value = 0.01;
  r.coeff_norm = 0.3;
  r.decision = true;
  const std::string csv = edge_tests_csv({r});
  CHECK(csv.rfind("source,target,F,p,norm,decision\n3,2,", 0) == 0);
}

TEST_CASE("sidecar and hashes") {
  const auto model = random_model(test::small_config(1));
  const auto ts = simulate(model, 20, 5, 9);
  const json meta = series_meta(ts, model_hash(model));
  CHECK(meta.at("m") == 3);
  CHECK(meta.at("l") == 3);
  CHECK(meta.at("T") == 20);
  CHECK(meta.at("burn_in") == 5);
  CHECK(meta.at("seed") == 9);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("estimate and grid exports") {
  const auto ts = simulate(random_model(test::small_config(1)), 300, 50, 2);
  const json j = to_json(estimate_s(ts, {.order = 2}));
  CHECK(j.at("block") == "L_BLOCK");
  CHECK(j.at("order") == 2);
  CHECK(j.at("per_row_rss").size() == 3);
  CHECK(j.at("residual_variances").size() == 3);
  const json g = to_json(spectrum_of_model(test::ar1(0.5), 8));
  CHECK(g.size() == 8);
  CHECK(g[0].at("re")[0][0].get<double>() == doctest::Approx(4.0));
}
