// Serial vs OpenMP timings for the data-parallel kernels on the default
// 12-channel network. Each kernel also checks that both paths agree bit for
// bit, since that is what lets the parallel path stand in for the reference.
//
//   lrdn_bench [repeats] [T]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "lrdn/experiment.hpp"
#include "lrdn/model.hpp"
#include "lrdn/sim.hpp"
#include "lrdn/spectral.hpp"
#include "lrdn/topology.hpp"
#include "lrdn/wiener.hpp"

using namespace lrdn;

namespace {

double median_seconds(int repeats, const std::function<void()>& fn) {
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

bool all_ok = true;

template <class Run, class Same>
void bench(const char* name, int repeats, Run run, Same same) {
  auto serial = run(Exec::Serial);
  auto parallel = run(Exec::Parallel);
  const bool match = same(serial, parallel);
  all_ok = all_ok && match;
  const double ts = median_seconds(repeats, [&] { serial = run(Exec::Serial); });
  const double tp = median_seconds(repeats, [&] { parallel = run(Exec::Parallel); });
  std::printf("%-22s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, ts / tp, match ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  const Index T = argc > 2 ? std::max(100, std::atoi(argv[2])) : 4000;

  ExperimentConfig config = default_config();
  const auto model = random_model(config.generator);
  const auto data = simulate(model, T, kDefaultBurnIn, 7);
  const EstimateOptions est_opts{.order = 2};

  std::printf("threads %d, T = %lld, repeats %d\n", omp_get_max_threads(), static_cast<long long>(T), repeats);
  std::printf("%-22s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

  bench("estimate_s", repeats, [&](Exec e) { return estimate_s(data, est_opts, e); },
        [](const FilterEstimate& a, const FilterEstimate& b) { return a.residuals == b.residuals; });
  bench("estimate_h", repeats, [&](Exec e) { return estimate_h(data, est_opts, e); },
        [](const FilterEstimate& a, const FilterEstimate& b) { return a.residuals == b.residuals; });
  bench("spectrum_of_model", repeats, [&](Exec e) { return spectrum_of_model(model, 256, {}, e); },
        [](const SpectralGrid& a, const SpectralGrid& b) { return a.values == b.values; });

  const auto h = estimate_h(data, est_opts);
  const auto s = estimate_s(data, est_opts);
  bench("decide_graph", repeats,
        [&](Exec e) { return decide_graph(h, s, data, {.alpha = 0.01}, Correction::Bonferroni, e); },
        [](const Decision& a, const Decision& b) {
          if (a.tests.size() != b.tests.size()) return false;
          for (std::size_t k = 0; k < a.tests.size(); ++k) {
            if (a.tests[k].p_value != b.tests[k].p_value) return false;
          }
          return true;
        });
  bench("partition_select", repeats, [&](Exec e) { return partition_select(data.data, config.partition, e); },
        [](const Partition& a, const Partition& b) {
          return a.pivot_ratios == b.pivot_ratios && a.l_indices == b.l_indices;
        });

  config.trials = 20;
  bench("run_experiment x20", std::max(1, repeats / 2), [&](Exec e) { return run_experiment(config, e); },
        [](const ExperimentReport& a, const ExperimentReport& b) {
          if (a.trials.size() != b.trials.size()) return false;
          for (std::size_t k = 0; k < a.trials.size(); ++k) {
            if (a.trials[k].metrics.precision != b.trials[k].metrics.precision ||
                a.trials[k].metrics.recall != b.trials[k].metrics.recall) {
              return false;
            }
          }
          return true;
        });

  return all_ok ? 0 : 1;
}
