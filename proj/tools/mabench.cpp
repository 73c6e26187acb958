// mabench: build multi-audio benchmark shards from single-audio corpora,
// synthesize discriminative training pairs, collect model responses, and
// score them with exact metrics plus a majority-vote LLM judge.
//
// Exit codes: 0 ok, 1 data/config error, 2 service error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mabench/config.hpp"
#include "mabench/error.hpp"
#include "mabench/pipeline.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_override;
  std::string task_filter;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int limit = 0;
};

mabench::RunConfig load_config(const CliOptions& opts) {
  mabench::RunConfig cfg = mabench::load_run_config(opts.config_path);
  if (opts.seed_set) {
    cfg.seed = opts.seed_override;
    // re-derive per-task seeds that were not pinned in the config
    for (auto& spec : cfg.tasks) {
      spec.seed = mabench::derive_seed(cfg.seed, spec.task + "|" + spec.dataset);
    }
  }
  if (!opts.out_override.empty()) cfg.out_dir = opts.out_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "multi-audio benchmark construction, training-data synthesis and "
      "evaluation"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "run config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", opts.seed_override, "override the run seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  app.add_option("--task", opts.task_filter, "restrict to one task id");
  app.add_option("--limit", opts.limit, "cap samples per shard");
  app.add_option("--out", opts.out_override, "override the output directory");

  auto* cmd_build = app.add_subcommand("build-benchmark",
                                       "construct pair-sample shards + stats");
  auto* cmd_synth = app.add_subcommand("synth-train",
                                       "synthesize the training-data mix");
  auto* cmd_eval = app.add_subcommand("evaluate",
                                      "collect model responses for each shard");
  auto* cmd_judge = app.add_subcommand("judge",
                                       "run the majority-vote judge on "
                                       "open-ended responses");
  auto* cmd_score = app.add_subcommand("score", "compute metrics per shard");
  auto* cmd_report = app.add_subcommand("report", "assemble the run report");

  CLI11_PARSE(app, argc, argv);

  try {
    mabench::Pipeline pipeline(load_config(opts));
    mabench::StageFilter filter{opts.task_filter, opts.limit};
    if (cmd_build->parsed()) pipeline.build_benchmark(filter);
    if (cmd_synth->parsed()) pipeline.synth_train();
    if (cmd_eval->parsed()) pipeline.evaluate(filter);
    if (cmd_judge->parsed()) pipeline.judge(filter);
    if (cmd_score->parsed()) pipeline.score(filter);
    if (cmd_report->parsed()) pipeline.report();
  } catch (const mabench::ServiceError& e) {
    std::cerr << "service error: " << e.what() << "\n";
    return 2;
  } catch (const mabench::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
