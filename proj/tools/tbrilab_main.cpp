#include <CLI11.hpp>

#include <iostream>

#include "tbrilab/cli.hpp"

using namespace tbrilab;

int main(int argc, char** argv) {
  CLI::App app{"tbrilab: MTE-tag based data-race inference over enumerable thread interleavings"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::string format = "text";
  app.add_option("--format", format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", global.seed, "Seed for random scheduling / fuzzing");
  app.add_option("--max-traces", global.max_traces, "Interleaving cap per program");
  app.add_flag("--quiet", global.quiet, "Only print summaries");

  RunOptions run_opts;
  std::string engine = "both", schedule = "enumerate";
  auto* run = app.add_subcommand("run", "Run detectors over a program's interleavings");
  run->add_option("program", run_opts.program_path, "DSL program file")->required();
  run->add_option("--engine", engine, "tbri, hb, or both")
      ->check(CLI::IsMember({"tbri", "hb", "both"}));
  run->add_option("--schedule", schedule, "enumerate or seed")
      ->check(CLI::IsMember({"enumerate", "seed"}));

  FuzzOptions fuzz_opts;
  auto* fuzz = app.add_subcommand("fuzz", "Random programs; confirm every report against the oracle");
  fuzz->add_option("count", fuzz_opts.count, "Number of programs")->required();
  fuzz->add_option("--max-threads", fuzz_opts.max_threads, "Threads per program");
  fuzz->add_option("--max-events", fuzz_opts.max_events, "Events per thread");
  fuzz->add_option("--max-pointees", fuzz_opts.max_pointees, "Shared allocations per program");
  fuzz->add_option("--max-locks", fuzz_opts.max_locks, "Locks per program");
  fuzz->add_option("--out", fuzz_opts.out_path, "Counterexample artifact path");

  CasesOptions cases_opts;
  std::string cases_mode = "run";
  auto* cases = app.add_subcommand("cases", "Built-in corpus: list or run against expected labels");
  cases->add_option("mode", cases_mode, "run or list")->check(CLI::IsMember({"run", "list"}));
  cases->add_option("--executions", cases_opts.executions,
                    "0: enumerate all interleavings; N: N seeded schedules per case");
  cases->add_option("--manifest", cases_opts.manifest_path, "Override expected labels");

  MetricsOptions metrics_opts;
  auto* metrics = app.add_subcommand("metrics", "Join expected labels with observed case reports");
  metrics->add_option("manifest", metrics_opts.manifest_path, "Manifest JSON")->required();
  metrics->add_option("reports", metrics_opts.reports_path, "Observed case_result records")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  global.format = format == "json" ? OutputFormat::Json : OutputFormat::Text;
  run_opts.engine = engine == "tbri" ? EngineChoice::Tbri
                    : engine == "hb" ? EngineChoice::Hb
                                     : EngineChoice::Both;
  run_opts.schedule = schedule == "seed" ? ScheduleChoice::Seed : ScheduleChoice::Enumerate;
  cases_opts.run = cases_mode == "run";

  if (run->parsed()) return cmd_run(global, run_opts, std::cout, std::cerr);
  if (fuzz->parsed()) return cmd_fuzz(global, fuzz_opts, std::cout, std::cerr);
  if (cases->parsed()) return cmd_cases(global, cases_opts, std::cout, std::cerr);
  if (metrics->parsed()) return cmd_metrics(global, metrics_opts, std::cout, std::cerr);
  return 2;
}
