// Command-line front end: scenario generation, composition, allocation,
// sweeps and output verification. Exit codes: 0 ok, 2 validation problem,
// 3 infeasible scenario.

#include "sdaas/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace sdaas;

int cmd_generate(const GeneratorConfig& gen, const std::string& out) {
  Scenario scenario = generate_scenario(gen);
  save_scenario(scenario, out);
  std::cout << "wrote " << out << ": " << scenario.network.size() << " nodes, "
            << scenario.network.segments().size() << " segments, "
            << scenario.requests.size() << " requests, fleet "
            << scenario.provider.fleet_size << "\n";
  return 0;
}

int cmd_compose(const std::string& scenario_path, const std::string& out) {
  Scenario scenario = load_scenario(scenario_path);
  auto violations = validate_scenario(scenario);
  if (!violations.empty()) throw ValidationError(join_violations(violations));
  auto records = compose_all(scenario.network, scenario.requests, scenario.energy,
                             scenario.pricing, scenario.provider);
  write_compose_csv(out, records);
  int servable = 0, eligible = 0;
  for (const auto& r : records) {
    servable += r.servable();
    eligible += r.eligible();
  }
  std::cout << "wrote " << out << ": " << records.size() << " requests, " << servable
            << " servable, " << eligible << " eligible\n";
  return 0;
}

int cmd_allocate(const std::string& scenario_path, const RunOptions& options) {
  Scenario scenario = load_scenario(scenario_path);
  ExperimentReport report = run_experiment(scenario, options);
  std::cout << report.requests << " requests, " << report.eligible << " eligible\n";
  for (const MethodResult& m : report.methods)
    std::cout << m.method << ": profit " << m.profit << ", served " << m.served << "/"
              << report.eligible << ", " << m.wall_ms << " ms\n";
  std::cout << "outputs in " << options.outdir << "\n";
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& vary,
              const std::vector<int>& values, const RunOptions& options,
              const std::string& out) {
  Scenario scenario = load_scenario(scenario_path);
  sweep(scenario, vary, values, options, out);
  std::cout << "wrote " << out << ": " << values.size() << " points x "
            << options.methods.size() << " methods\n";
  return 0;
}

int cmd_verify(const std::string& dir) {
  auto violations = verify_outdir(dir);
  if (violations.empty()) {
    std::cout << dir << ": ok\n";
    return 0;
  }
  for (const Violation& v : violations)
    std::cerr << v.code << ": " << v.detail << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarm drone delivery: trip composition and fleet scheduling"};
  app.require_subcommand(1);

  GeneratorConfig gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a seeded random scenario");
  generate->add_option("--nodes", gen.n_nodes, "network size")->capture_default_str();
  generate->add_option("--requests", gen.requests, "requests per day")->capture_default_str();
  generate->add_option("--fleet", gen.fleet_size, "drones owned")->capture_default_str();
  generate->add_option("--seed", gen.seed, "master RNG seed")->capture_default_str();
  generate->add_option("--area", gen.area, "square side, meters")->capture_default_str();
  generate->add_option("--pad-min", gen.pad_min, "fewest pads per node")->capture_default_str();
  generate->add_option("--pad-max", gen.pad_max, "most pads per node")->capture_default_str();
  generate->add_option("--windows", gen.windows, "delivery windows per day")
      ->capture_default_str();
  generate->add_option("-o,--out", gen_out, "scenario JSON path")->required();

  std::string compose_scenario, compose_out;
  auto* compose = app.add_subcommand("compose", "compose every request of a scenario");
  compose->add_option("scenario", compose_scenario, "scenario JSON")->required();
  compose->add_option("-o,--out", compose_out, "composition CSV path")->required();

  std::string alloc_scenario, alloc_out;
  std::vector<std::string> alloc_methods{"rl"};
  int alloc_episodes = 0;
  std::uint64_t alloc_seed = 0;
  auto* allocate = app.add_subcommand("allocate", "schedule the fleet over a scenario");
  allocate->add_option("scenario", alloc_scenario, "scenario JSON")->required();
  allocate->add_option("--method", alloc_methods, "rl, fcfs and/or oracle")
      ->capture_default_str();
  auto* episodes_opt =
      allocate->add_option("--episodes", alloc_episodes, "training episode override");
  auto* seed_opt = allocate->add_option("--seed", alloc_seed, "seed override");
  double alloc_granularity = 0;
  auto* granularity_opt = allocate->add_option("--granularity", alloc_granularity,
                                               "arrival slot spacing override, seconds");
  allocate->add_option("-o,--out", alloc_out, "output directory")->required();

  std::string sweep_scenario, sweep_vary, sweep_out;
  std::vector<int> sweep_values;
  std::vector<std::string> sweep_methods{"rl", "fcfs"};
  auto* sweep_cmd = app.add_subcommand("sweep", "rerun over a range of requests or fleet");
  sweep_cmd->add_option("scenario", sweep_scenario, "scenario JSON")->required();
  sweep_cmd->add_option("--vary", sweep_vary, "requests or fleet")->required();
  sweep_cmd->add_option("--values", sweep_values, "points to evaluate")->required();
  sweep_cmd->add_option("--method", sweep_methods, "methods per point")
      ->capture_default_str();
  sweep_cmd->add_option("-o,--out", sweep_out, "report CSV path")->required();

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "re-check every invariant of an output dir");
  verify->add_option("dir", verify_dir, "directory written by allocate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, gen_out);
    if (compose->parsed()) return cmd_compose(compose_scenario, compose_out);
    if (allocate->parsed()) {
      RunOptions options;
      options.methods = alloc_methods;
      options.outdir = alloc_out;
      if (episodes_opt->count()) options.episodes = alloc_episodes;
      if (seed_opt->count()) options.seed = alloc_seed;
      if (granularity_opt->count()) options.slot_granularity = alloc_granularity;
      return cmd_allocate(alloc_scenario, options);
    }
    if (sweep_cmd->parsed()) {
      RunOptions options;
      options.methods = sweep_methods;
      return cmd_sweep(sweep_scenario, sweep_vary, sweep_values, options, sweep_out);
    }
    if (verify->parsed()) return cmd_verify(verify_dir);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
