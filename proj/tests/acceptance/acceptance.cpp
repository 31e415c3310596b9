// Acceptance suite: one PASS/FAIL line per criterion. Every criterion writes
// its measurements to <out>/run1; the determinism criterion repeats the whole
// suite into <out>/run2 and compares the files byte for byte.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "lrdn/error.hpp"
#include "lrdn/experiment.hpp"

using namespace lrdn;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
  json record;  ///< written to the run directory; must not contain timings
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  ///< seconds; 0 for none
  std::function<Outcome(const fs::path&)> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::uint64_t seed_for(int criterion, std::size_t k) { return derive_seed(kMasterSeed, k, criterion); }

GeneratorConfig flagship_generator(std::uint64_t seed) {
  GeneratorConfig g = default_config().generator;
  g.rng_seed = seed;
  return g;
}

/// Mixed shapes: l in 2..6, degrees up to 4, half with contemporaneous terms.
GeneratorConfig mixed_generator(std::size_t k, std::uint64_t seed) {
  GeneratorConfig g;
  g.l = 2 + static_cast<Index>(k % 5);
  g.m = 1 + static_cast<Index>(k % 3);
  g.degree_l = 1 + static_cast<int>(k % 4);
  g.degree_ml = 1 + static_cast<int>((k / 4) % 4);
  g.edges_l = static_cast<int>(g.l + g.l / 2);
  g.edges_ml = static_cast<int>(g.m + 1);
  g.include_lag0_offdiag = k % 2 == 1;
  g.rng_seed = seed;
  return g;
}

std::vector<LrdnModel> mixed_models(int criterion, std::size_t count) {
  std::vector<LrdnModel> models(count);
  for_each_index(Exec::Parallel, count,
                 [&](std::size_t k) { models[k] = random_model(mixed_generator(k, seed_for(criterion, k))); });
  return models;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome closed_form_oracle(const fs::path&) {
  const auto models = mixed_models(1, 50);
  std::vector<double> err(models.size());
  for_each_index(Exec::Parallel, models.size(), [&](std::size_t k) {
    const PolyMatrix via_factor = exact_s_via_factor(reduced_form(models[k]).w_factor);
    err[k] = max_abs_diff(via_factor, exact_filters(models[k]).s);
  });
  const double worst = max_of(err);
  return {worst < 1e-8, "50 models, max coefficient error " + fmt("%.3g", worst), {{"max_error", worst}}};
}

Outcome support_equivalence(const fs::path&) {
  const auto models = mixed_models(2, 100);
  std::vector<int> ok(models.size());
  for_each_index(Exec::Parallel, models.size(),
                 [&](std::size_t k) { ok[k] = corollary1_check(models[k], {}, 1e-9) ? 1 : 0; });
  const int hits = std::accumulate(ok.begin(), ok.end(), 0);
  return {hits == 100, std::to_string(hits) + "/100 models", {{"true_count", hits}}};
}

Outcome strict_causality(const fs::path&) {
  const auto models = mixed_models(3, 30);
  std::vector<double> exact_diag(models.size());
  std::vector<double> est_diag(models.size());
  for_each_index(Exec::Parallel, models.size(), [&](std::size_t k) {
    const auto& model = models[k];
    exact_diag[k] = exact_filters(model).s.coeff(0).diagonal().cwiseAbs().maxCoeff();
    const auto data = simulate(model, 1000, kDefaultBurnIn, seed_for(3, 1000 + k));
    const auto est = estimate_s(data, {.order = model.g_l.degree()}, Exec::Serial);
    est_diag[k] = est.coeffs.coeff(0).diagonal().cwiseAbs().maxCoeff();
  });
  const double e = max_of(exact_diag);
  const double s = max_of(est_diag);
  return {s == 0.0 && e < 1e-12,
          "30 models, estimated max |S0_ii| " + fmt("%.3g", s) + ", exact max |S0_ii| " + fmt("%.3g", e),
          {{"estimated_max", s}, {"exact_max", e}}};
}

Outcome h_identity(const fs::path&) {
  const auto models = mixed_models(4, 20);
  std::vector<double> err(models.size());
  for_each_index(Exec::Parallel, models.size(), [&](std::size_t k) {
    const auto h = h_closed_form(models[k], 64, {}, Exec::Serial);
    double worst = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      const double theta = 2.0 * 3.14159265358979323846 * static_cast<double>(j) / 64.0;
      worst = std::max(worst, (h[j] - evaluate(models[k].g_ml, theta)).norm());
    }
    err[k] = worst;
  });
  const double worst = max_of(err);
  return {worst < 1e-6, "20 models, max Frobenius error " + fmt("%.3g", worst), {{"max_error", worst}}};
}

Outcome spectral_rank(const fs::path&) {
  const std::size_t n = 20;
  std::vector<double> ratio(n);
  for_each_index(Exec::Parallel, n, [&](std::size_t k) {
    const auto model = random_model(flagship_generator(seed_for(5, k)));
    double worst = 0.0;
    for (const auto& s : singular_values(spectrum_of_model(model, 64, {}, Exec::Serial), Exec::Serial)) {
      worst = std::max(worst, s(4) / s(0));
    }
    ratio[k] = worst;
  });
  const double worst = max_of(ratio);
  return {worst < 1e-6, "20 models x 64 points, max sigma5/sigma1 " + fmt("%.3g", worst), {{"max_ratio", worst}}};
}

Outcome consistency(const fs::path&) {
  GeneratorConfig g;
  g.m = 2;
  g.l = 4;
  g.degree_l = 3;
  g.degree_ml = 2;
  g.edges_l = 7;
  g.edges_ml = 3;
  g.rng_seed = seed_for(6, 0);
  const auto model = random_model(g);
  const PolyMatrix exact = exact_filters(model).s;
  const std::vector<Index> horizons{2000, 8000, 32000};
  std::vector<double> med(horizons.size());
  for_each_index(Exec::Parallel, horizons.size(), [&](std::size_t k) {
    const auto data = simulate(model, horizons[k], kDefaultBurnIn, seed_for(6, 1 + k));
    const auto est = estimate_s(data, {.order = model.g_l.degree()}, Exec::Serial);
    std::vector<double> errors;
    for (int d = 0; d <= est.coeffs.degree(); ++d) {
      const MatrixXd diff = (est.coeffs.coeff(d) - exact.coeff_or_zero(d)).cwiseAbs();
      for (Index i = 0; i < diff.rows(); ++i) {
        for (Index j = 0; j < diff.cols(); ++j) {
          if (d > 0 || i != j) errors.push_back(diff(i, j));  // skip the structural zeros
        }
      }
    }
    med[k] = median(errors);
  });
  const bool monotone = med[0] > med[1] && med[1] > med[2];
  return {monotone && med[2] < 0.03,
          "median error " + fmt("%.4f", med[0]) + " > " + fmt("%.4f", med[1]) + " > " + fmt("%.4f", med[2]),
          {{"median_errors", med}}};
}

Outcome recovery(const fs::path& dir) {
  ExperimentConfig c = default_config();
  c.trials = 20;
  c.master_seed = seed_for(7, 0);
  const auto report = run_experiment(c, Exec::Parallel);
  write_experiment(report, c, (dir / "recovery").string());
  fs::remove(dir / "recovery" / "runtime.json");
  const auto& s = report.summary;
  return {s.exact_match_rate >= 0.90 && s.mean_precision >= 0.97 && s.mean_recall >= 0.97,
          "exact match " + fmt("%.2f", s.exact_match_rate) + ", precision " + fmt("%.4f", s.mean_precision) +
              ", recall " + fmt("%.4f", s.mean_recall) + ", failed trials " + std::to_string(s.failed),
          {{"exact_match_rate", s.exact_match_rate}, {"mean_precision", s.mean_precision}, {"mean_recall", s.mean_recall}}};
}

Outcome test_size(const fs::path&) {
  // The pinned noise node has no inputs, so the group of any y_l source into
  // it is a true null.
  const std::size_t trials = 200;
  std::vector<int> reject(trials);
  std::vector<double> pvals(trials);
  for_each_index(Exec::Parallel, trials, [&](std::size_t k) {
    const auto model = random_model(flagship_generator(seed_for(8, k)));
    const auto data = simulate(model, 2000, kDefaultBurnIn, seed_for(8, 1000 + k));
    const auto est = estimate_s(data, {.order = 2}, Exec::Serial);
    const Index source = model.m + 1 + static_cast<Index>(k % 3);
    const auto r = edge_test(est, data, model.m + model.l, source, {.alpha = 0.05});
    reject[k] = r.decision ? 1 : 0;
    pvals[k] = r.p_value;
  });
  const double rate = std::accumulate(reject.begin(), reject.end(), 0) / static_cast<double>(trials);
  return {rate >= 0.02 && rate <= 0.09, "200 null groups at alpha 0.05, rejection rate " + fmt("%.3f", rate),
          {{"rejection_rate", rate}, {"p_values", pvals}}};
}

Outcome deterministic_relation(const fs::path&) {
  const std::size_t n = 20;
  std::vector<double> rms(n);
  for_each_index(Exec::Parallel, n, [&](std::size_t k) {
    const auto model = random_model(flagship_generator(seed_for(9, k)));
    const auto data = simulate(model, 2000, kDefaultBurnIn, seed_for(9, 1000 + k));
    const auto est = estimate_h(data, {.order = model.g_ml.degree()}, Exec::Serial);
    rms[k] = std::sqrt(est.rss.maxCoeff() / static_cast<double>(est.effective_samples()));
  });
  const double worst = max_of(rms);
  return {worst < 1e-8, "20 seeds, max residual RMS " + fmt("%.3g", worst), {{"max_rms", worst}}};
}

Outcome partition_recovery(const fs::path&) {
  const std::size_t n = 40;
  const ExperimentConfig c = default_config();
  std::vector<int> ok(n);
  std::vector<double> resid(n);
  for_each_index(Exec::Parallel, n, [&](std::size_t k) {
    const auto model = random_model(flagship_generator(seed_for(10, k)));
    const auto data = simulate(model, 2000, kDefaultBurnIn, seed_for(10, 1000 + k));
    try {
      const Partition p = partition_select(data.data, c.partition, Exec::Serial);
      resid[k] = relation_residual(apply_partition(data.data, p), model.g_ml.degree());
      ok[k] = p.l() == 4 && resid[k] < 1e-6 ? 1 : 0;
    } catch (const Error&) {
      resid[k] = -1.0;
    }
  });
  const int hits = std::accumulate(ok.begin(), ok.end(), 0);
  return {hits >= 38, std::to_string(hits) + "/40 seeds with |l| = 4 and residual < 1e-6, max residual " +
                          fmt("%.3g", max_of(resid)),
          {{"successes", hits}, {"residuals", resid}}};
}

std::vector<Criterion> criteria() {
  return {{1, "closed-form oracle", 10.0, closed_form_oracle},
          {2, "support equivalence", 10.0, support_equivalence},
          {3, "strict causality", 0.0, strict_causality},
          {4, "H identity", 10.0, h_identity},
          {5, "spectral rank", 0.0, spectral_rank},
          {6, "estimation consistency", 60.0, consistency},
          {7, "flagship recovery", 60.0, recovery},
          {8, "test size", 120.0, test_size},
          {9, "deterministic relation", 0.0, deterministic_relation},
          {10, "partition recovery", 0.0, partition_recovery}};
}

struct RunResult {
  bool pass;
  std::string line;
};

RunResult run_one(const Criterion& c, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run(dir);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
  write_text_file((dir / ("criterion" + std::to_string(c.id) + ".json")).string(), o.record.dump(2) + "\n");
  std::string line = std::string(o.pass && in_time ? "PASS" : "FAIL") + " " + std::to_string(c.id) + " " + c.name +
                     ": " + o.detail + " (" + fmt("%.2f", secs) + " s";
  if (c.time_limit > 0.0) line += ", limit " + fmt("%.0f", c.time_limit) + " s";
  line += ")";
  return {o.pass && in_time, line};
}

std::vector<std::string> differing_files(const fs::path& a, const fs::path& b) {
  std::vector<std::string> diffs;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    const fs::path other = b / rel;
    if (!fs::exists(other) || read_text_file(entry.path().string()) != read_text_file(other.string())) {
      diffs.push_back(rel.string());
    }
  }
  return diffs;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::remove_all(out);
  const fs::path run1 = out / "run1";
  const fs::path run2 = out / "run2";
  fs::create_directories(run1);
  fs::create_directories(run2);

  int failures = 0;
  for (const auto& c : criteria()) {
    const auto r = run_one(c, run1);
    failures += r.pass ? 0 : 1;
    std::cout << r.line << std::endl;
  }

  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : criteria()) run_one(c, run2);
  const auto diffs = differing_files(run1, run2);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(run1)) files += e.is_regular_file() ? 1 : 0;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool same = diffs.empty() && files > 0;
  std::string detail = std::to_string(files) + " result files byte-identical on rerun";
  if (!same) {
    detail = std::to_string(diffs.size()) + " of " + std::to_string(files) + " result files differ";
    for (const auto& d : diffs) detail += " " + d;
  }
  std::cout << (same ? "PASS" : "FAIL") << " 11 determinism: " << detail << " (" << fmt("%.2f", secs) << " s)"
            << std::endl;
  failures += same ? 0 : 1;

  std::cout << (failures == 0 ? "all 11 criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
