#pragma once

#include "sdaas/composer.hpp"
#include "sdaas/fcfs.hpp"
#include "sdaas/oracle.hpp"
#include "sdaas/rl.hpp"
#include "sdaas/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sdaas {

struct RunOptions {
  std::vector<std::string> methods;        // subset of {"rl", "fcfs", "oracle"}
  std::optional<int> episodes;             // overrides scenario rl.episodes
  std::optional<std::uint64_t> seed;       // overrides scenario seed
  std::optional<double> slot_granularity;  // overrides scenario rl.slot_granularity
  std::string outdir;                      // empty = keep everything in memory
  OracleLimits oracle_limits;
};

struct MethodResult {
  std::string method;
  double profit = 0;
  int served = 0;
  double wall_ms = 0;  // allocation phase only
  Schedule schedule;
  std::vector<std::pair<RequestId, std::string>> skipped;
};

struct ExperimentReport {
  int requests = 0;
  int servable = 0;
  int eligible = 0;
  double compose_ms = 0;
  std::vector<MethodResult> methods;
  std::vector<double> rl_returns;
  std::string rl_encoder;
};

/// Composes every request once, runs each allocation method against the
/// shared composition, and (optionally) writes all artifacts to `outdir`.
ExperimentReport run_experiment(const Scenario& scenario, const RunOptions& options);

/// Sweeps request count or fleet size over `values`, appending one CSV row
/// per (value, method) to `report_csv`.
void sweep(const Scenario& scenario, const std::string& vary,
           const std::vector<int>& values, const RunOptions& options,
           const std::string& report_csv);

/// Re-derives every invariant of a written experiment directory from its
/// scenario: recomposition, schedule feasibility, profit accounting.
std::vector<Violation> verify_outdir(const std::string& dir);

}  // namespace sdaas
