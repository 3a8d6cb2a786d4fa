// Command-line front end: polytope/ellipsoid export, Table-style benchmarks,
// multi-robot composition and dual-arm load-share simulation.

#include <iostream>

#include <CLI11.hpp>

#include "polycap/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Task-space force/velocity capability polytopes for serial manipulators"};
  app.require_subcommand(1);

  polycap::cli::PolytopeCmd pcmd;
  CLI::App* poly = app.add_subcommand("polytope", "Compute a capability polytope at one configuration");
  poly->add_option("model", pcmd.model_file, "robot description JSON")->required();
  poly->add_option("--q", pcmd.q, "joint configuration, rad (comma separated)")
      ->required()
      ->delimiter(',');
  poly->add_option("--task", pcmd.task, "task axes, e.g. x,y or x,y,z (default: per robot)");
  poly->add_option("--kind", pcmd.kind, "force | velocity | residual")
      ->check(CLI::IsMember({"force", "velocity", "residual"}));
  poly->add_flag("--bias-g", pcmd.bias_gravity, "subtract gravity torque (residual kind)");
  poly->add_option("--bias-n", pcmd.bias_wrench, "nominal task wrench f_n (residual kind)")
      ->delimiter(',');
  poly->add_option("--out", pcmd.format, "artifact format: json | off | csv")
      ->check(CLI::IsMember({"json", "off", "csv"}));
  poly->add_option("-o,--output", pcmd.output, "write artifact to file instead of stdout");
  poly->add_option("--threads", pcmd.threads, "face-solve workers");

  polycap::cli::BenchCmd bcmd;
  CLI::App* bench = app.add_subcommand("bench", "Vertex-search statistics over random configurations");
  bench->add_option("model", bcmd.model_file, "robot description JSON")->required();
  bench->add_option("--task", bcmd.task, "task axes (default: per robot)");
  bench->add_option("--trials", bcmd.trials, "number of sampled configurations")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bcmd.seed, "master RNG seed");
  bench->add_flag("--baseline", bcmd.baseline, "also run the unreduced full-system path and compare");
  bench->add_option("--threads", bcmd.threads, "parallel trial workers");
  bench->add_option("--csv", bcmd.csv_output, "write the CSV table to a file");

  polycap::cli::CombineCmd ccmd;
  CLI::App* comb = app.add_subcommand("combine", "Minkowski sum or intersection of two force polytopes");
  comb->add_option("--model1", ccmd.model1, "first robot JSON")->required();
  comb->add_option("--q1", ccmd.q1, "first configuration")->required()->delimiter(',');
  comb->add_option("--model2", ccmd.model2, "second robot JSON")->required();
  comb->add_option("--q2", ccmd.q2, "second configuration")->required()->delimiter(',');
  comb->add_option("--task", ccmd.task, "task axes (default: per first robot)");
  comb->add_option("--op", ccmd.op, "sum | intersect")
      ->check(CLI::IsMember({"sum", "intersect"}));
  comb->add_option("--out", ccmd.format, "artifact format: json | off | csv")
      ->check(CLI::IsMember({"json", "off", "csv"}));
  comb->add_option("-o,--output", ccmd.output, "write artifact to file instead of stdout");
  comb->add_option("--threads", ccmd.threads, "face-solve workers");

  polycap::cli::LoadShareCmd lcmd;
  CLI::App* ls = app.add_subcommand("loadshare", "Dual-arm carrying simulation over a trajectory");
  ls->add_option("scenario", lcmd.scenario_file, "scenario JSON")->required();
  ls->add_option("--policy", lcmd.policy, "adaptive | fixed:<lambda>");
  ls->add_option("-o,--output", lcmd.output, "write trace CSV to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return polycap::cli::kInputError;
  }

  if (poly->parsed()) return polycap::cli::cmd_polytope(pcmd, std::cout, std::cerr);
  if (bench->parsed()) return polycap::cli::cmd_bench(bcmd, std::cout, std::cerr);
  if (comb->parsed()) return polycap::cli::cmd_combine(ccmd, std::cout, std::cerr);
  if (ls->parsed()) return polycap::cli::cmd_loadshare(lcmd, std::cout, std::cerr);
  return polycap::cli::kInputError;
}
