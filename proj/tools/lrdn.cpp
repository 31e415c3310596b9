// Command-line front end: lrdn <generate|simulate|estimate|decide|compare|run-experiment>.

#include <CLI11.hpp>

#include <iostream>

#include "lrdn/experiment.hpp"

namespace {

void add_common(CLI::App* sub, lrdn::CommandOptions& o) {
  sub->add_option("--config", o.config_path, "JSON configuration file");
  sub->add_option("--seed", o.seed, "master seed (overrides the config)");
  sub->add_option("--out-dir", o.out_dir, "output directory");
  sub->add_option("--format", o.format, "format of the result printed to stdout")
      ->check(CLI::IsMember({"json", "csv", "dot"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank dynamical network toolkit"};
  app.require_subcommand(1);
  lrdn::CommandOptions o;

  auto* gen = app.add_subcommand("generate", "draw a random model and its true graph");
  add_common(gen, o);

  auto* sim = app.add_subcommand("simulate", "simulate a model to data.csv");
  add_common(sim, o);
  sim->add_option("--model", o.model_path, "model JSON (default: generate from config)");

  auto* est = app.add_subcommand("estimate", "select the partition, estimate filters and decide the graph");
  add_common(est, o);
  est->add_option("--data", o.data_path, "data CSV")->required();

  auto* dec = app.add_subcommand("decide", "decide the graph with a known partition");
  add_common(dec, o);
  dec->add_option("--data", o.data_path, "data CSV");
  dec->add_option("--meta", o.meta_path, "metadata sidecar giving m and l");
  dec->add_option("--model", o.model_path, "model JSON for a population decision");

  auto* cmp = app.add_subcommand("compare", "score an estimated graph against the truth");
  add_common(cmp, o);
  cmp->add_option("--estimated", o.estimated_path, "estimated graph JSON")->required();
  cmp->add_option("--truth", o.truth_path, "true graph JSON")->required();

  auto* exp = app.add_subcommand("run-experiment", "Monte-Carlo recovery experiment");
  add_common(exp, o);
  exp->add_option("--trials", o.trials, "number of trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lrdn::kExitConfig;
  }

  if (gen->parsed()) return lrdn::cmd_generate(o, std::cout, std::cerr);
  if (sim->parsed()) return lrdn::cmd_simulate(o, std::cout, std::cerr);
  if (est->parsed()) return lrdn::cmd_estimate(o, std::cout, std::cerr);
  if (dec->parsed()) return lrdn::cmd_decide(o, std::cout, std::cerr);
  if (cmp->parsed()) return lrdn::cmd_compare(o, std::cout, std::cerr);
  return lrdn::cmd_run_experiment(o, std::cout, std::cerr);
}
