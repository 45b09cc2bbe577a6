#include <string>

#include <CLI11.hpp>

#include "trainplan/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Guaranteed labour-force training planner"};
  app.require_subcommand(1);

  trainplan::cli::RunOptions opts;
  std::string out_dir;
  std::string format;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"econ", "evaluate the education-market formulas"},
      {"validate", "estimate regularity constants for the dynamics"},
      {"solve-discrete", "backward-induction minimax solve"},
      {"solve-continuous", "partition-refined game approximation"},
      {"oracle", "exhaustive game-tree value (ground truth, small instances)"},
  };

  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("config", opts.config_path, "problem config (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--threads", opts.threads,
                    "worker threads (default: machine parallelism)");
    sub->add_flag("--quiet", opts.quiet, "suppress the summary printout");
    sub->callback([&opts, name = std::string(c.name)] { opts.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (!format.empty()) opts.format = format;

  trainplan::cli::RunReport report = trainplan::cli::run(opts);
  return report.error ? 1 : 0;
}
