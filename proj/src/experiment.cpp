#include "sdaas/experiment.hpp"

#include "sdaas/csv.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <unordered_map>

namespace sdaas {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

void write_report_json(const std::string& path, const ExperimentReport& report,
                       std::uint64_t seed, int episodes) {
  json methods = json::array();
  for (const MethodResult& m : report.methods)
    methods.push_back({{"method", m.method},
                       {"profit", m.profit},
                       {"served", m.served},
                       {"wall_ms", m.wall_ms}});
  json j{{"requests", report.requests},
         {"servable", report.servable},
         {"eligible", report.eligible},
         {"compose_ms", report.compose_ms},
         {"seed", seed},
         {"episodes", episodes},
         {"methods", methods}};
  if (!report.rl_encoder.empty()) j["rl_encoder"] = report.rl_encoder;

  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

ExperimentReport run_experiment(const Scenario& scenario, const RunOptions& options) {
  auto violations = validate_scenario(scenario);
  if (!violations.empty()) throw ValidationError(join_violations(violations));

  std::uint64_t seed = options.seed.value_or(scenario.seed);
  RlParams rlp = scenario.rl;
  if (options.episodes) rlp.episodes = *options.episodes;
  if (options.slot_granularity) rlp.slot_granularity = *options.slot_granularity;

  bool persist = !options.outdir.empty();
  fs::path dir(options.outdir);
  if (persist) fs::create_directories(dir);

  auto t0 = clock_type::now();
  std::vector<CompositionRecord> records =
      compose_all(scenario.network, scenario.requests, scenario.energy, scenario.pricing,
                  scenario.provider);
  std::vector<ServiceOffer> offers =
      make_offers(records, scenario.requests, rlp.slot_granularity);

  ExperimentReport report;
  report.compose_ms = ms_since(t0);
  report.requests = static_cast<int>(scenario.requests.size());
  for (const CompositionRecord& r : records) {
    if (r.servable()) ++report.servable;
    if (r.eligible()) ++report.eligible;
  }

  if (persist) {
    // persist the effective seed and rl parameters so the directory is
    // self-describing for verification and reruns
    Scenario effective = scenario;
    effective.seed = seed;
    effective.rl = rlp;
    save_scenario(effective, (dir / "scenario.json").string());
    write_compose_csv((dir / "compose.csv").string(), records);
  }

  for (const std::string& method : options.methods) {
    MethodResult result;
    result.method = method;
    auto start = clock_type::now();
    if (method == "rl") {
      TrainResult trained = train(offers, scenario.provider, rlp, seed);
      result.schedule = extract_schedule(trained.q, offers, scenario.provider, rlp);
      result.wall_ms = ms_since(start);
      report.rl_returns = std::move(trained.returns);
      report.rl_encoder = trained.encoder;
      if (persist) {
        write_schedule_csv((dir / "schedule_rl.csv").string(), result.schedule);
        write_rewards_csv((dir / "rewards.csv").string(), report.rl_returns);
      }
    } else if (method == "fcfs") {
      FcfsResult fcfs = allocate_fcfs(records, scenario.requests, scenario.provider,
                                      rlp.slot_granularity);
      result.schedule = std::move(fcfs.schedule);
      result.skipped = std::move(fcfs.skipped);
      result.wall_ms = ms_since(start);
      if (persist) {
        write_schedule_csv((dir / "schedule_fcfs.csv").string(), result.schedule);
        write_skipped_csv((dir / "skipped.csv").string(), result.skipped);
      }
    } else if (method == "oracle") {
      result.schedule = oracle_optimal(offers, scenario.provider, options.oracle_limits);
      result.wall_ms = ms_since(start);
      if (persist)
        write_schedule_csv((dir / "schedule_oracle.csv").string(), result.schedule);
    } else {
      throw ValidationError("unknown allocation method '" + method + "'");
    }

    auto bad = check_schedule(result.schedule, offers, scenario.provider);
    if (!bad.empty())
      throw ValidationError("method " + method + " produced an invalid schedule: " +
                            join_violations(bad));
    result.profit = result.schedule.total_profit;
    result.served = static_cast<int>(result.schedule.entries.size());
    report.methods.push_back(std::move(result));
  }

  if (persist)
    write_report_json((dir / "report.json").string(), report, seed, rlp.episodes);
  return report;
}

void sweep(const Scenario& scenario, const std::string& vary,
           const std::vector<int>& values, const RunOptions& options,
           const std::string& report_csv) {
  if (vary != "requests" && vary != "fleet")
    throw ValidationError("sweep can vary 'requests' or 'fleet', not '" + vary + "'");
  if (values.empty()) throw ValidationError("sweep needs at least one value");

  auto point_scenario = [&](int value) {
    Scenario point = scenario;
    if (vary == "requests") {
      if (scenario.generator) {
        point.requests = generate_requests(scenario.network, *scenario.generator, value,
                                           scenario.provider.source);
      } else if (value <= static_cast<int>(scenario.requests.size())) {
        point.requests.resize(value);
      } else {
        throw ValidationError("cannot extend a hand-written scenario to " +
                              std::to_string(value) + " requests");
      }
    } else {
      point.provider.fleet_size = value;
    }
    return point;
  };

  RunOptions point_options = options;
  point_options.outdir.clear();  // points stay in memory; only the report lands on disk

  // points are independent; run them concurrently and aggregate in order
  std::vector<std::future<ExperimentReport>> futures;
  for (int value : values)
    futures.push_back(std::async(std::launch::async, [&, value] {
      return run_experiment(point_scenario(value), point_options);
    }));

  csv::Writer w(report_csv);
  w.row({"vary", "value", "method", "profit", "served", "wall_ms"});
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentReport report = futures[i].get();
    for (const MethodResult& m : report.methods)
      w.row({vary, std::to_string(values[i]), m.method, csv::num(m.profit),
             std::to_string(m.served), csv::num(m.wall_ms)});
  }
  w.close();
}

namespace {

constexpr double verify_tol = 1e-4;  // CSV carries 6 decimals; stay well inside

void verify_schedule_file(const fs::path& file, const std::string& method,
                          const std::vector<ServiceOffer>& offers,
                          const ProviderConfig& cfg, std::vector<Violation>& out) {
  Schedule schedule = read_schedule_csv(file.string());
  for (Violation v : check_schedule(schedule, offers, cfg)) {
    v.code = method + "_" + v.code;
    out.push_back(std::move(v));
  }
}

std::string path_field(const std::vector<NodeId>& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(path[i]);
  }
  return s;
}

}  // namespace

std::vector<Violation> verify_outdir(const std::string& dir) {
  std::vector<Violation> out;
  fs::path base(dir);
  if (!fs::exists(base / "scenario.json")) {
    out.push_back({"missing_file", "scenario.json not found in " + dir});
    return out;
  }

  Scenario scenario;
  try {
    scenario = load_scenario((base / "scenario.json").string());
  } catch (const std::runtime_error& e) {
    out.push_back({"scenario", e.what()});
    return out;
  }
  for (Violation v : validate_scenario(scenario)) out.push_back(std::move(v));
  if (!out.empty()) return out;

  std::vector<CompositionRecord> records =
      compose_all(scenario.network, scenario.requests, scenario.energy, scenario.pricing,
                  scenario.provider);
  std::vector<ServiceOffer> offers =
      make_offers(records, scenario.requests, scenario.rl.slot_granularity);

  // compose.csv must byte-for-byte re-derive from the scenario
  if (!fs::exists(base / "compose.csv")) {
    out.push_back({"missing_file", "compose.csv not found in " + dir});
  } else {
    auto rows = csv::read_rows((base / "compose.csv").string(),
                               "request_id,swarm_size,at,rtt,profit,out_path,back_path");
    if (rows.size() != records.size()) {
      out.push_back({"compose_rows", "compose.csv row count differs from the request count"});
    } else {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const CompositionRecord& rec = records[i];
        std::string rid = "request " + row[0];
        if (csv::to_int(row[0], "compose.csv") != rec.request_id ||
            csv::to_int(row[1], "compose.csv") != rec.swarm_size) {
          out.push_back({"compose_mismatch", rid + " id or swarm size differs"});
          continue;
        }
        if (rec.servable() != !row[2].empty()) {
          out.push_back({"compose_mismatch", rid + " servability differs"});
          continue;
        }
        if (!rec.servable()) continue;
        const ComposedService& s = *rec.service;
        if (std::abs(csv::to_double(row[2], "compose.csv") - s.at) > verify_tol ||
            std::abs(csv::to_double(row[3], "compose.csv") - s.rtt) > verify_tol ||
            std::abs(csv::to_double(row[4], "compose.csv") - s.profit) > verify_tol)
          out.push_back({"compose_mismatch", rid + " timings or profit differ"});
        if (row[5] != path_field(s.out_path) || row[6] != path_field(s.back_path))
          out.push_back({"compose_mismatch", rid + " paths differ"});
      }
    }
  }

  bool any_schedule = false;
  for (const std::string& method : {std::string("rl"), std::string("fcfs"), std::string("oracle")}) {
    fs::path file = base / ("schedule_" + method + ".csv");
    if (!fs::exists(file)) continue;
    any_schedule = true;
    try {
      verify_schedule_file(file, method, offers, scenario.provider, out);
    } catch (const std::runtime_error& e) {
      out.push_back({method + "_schedule", e.what()});
    }
  }
  if (!any_schedule) out.push_back({"missing_file", "no schedule CSV found in " + dir});

  if (fs::exists(base / "schedule_rl.csv") && !fs::exists(base / "rewards.csv"))
    out.push_back({"missing_file", "rewards.csv missing next to schedule_rl.csv"});
  if (fs::exists(base / "rewards.csv")) {
    auto rows = csv::read_rows((base / "rewards.csv").string(), "episode,return");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != 2 ||
          csv::to_int(rows[i][0], "rewards.csv") != static_cast<std::int64_t>(i) ||
          !std::isfinite(csv::to_double(rows[i][1], "rewards.csv"))) {
        out.push_back({"rewards", "rewards.csv is not a dense finite episode series"});
        break;
      }
    }
  }

  if (fs::exists(base / "report.json")) {
    try {
      std::ifstream in(base / "report.json");
      json j;
      in >> j;
      for (const json& m : j.at("methods")) {
        std::string method = m.at("method").get<std::string>();
        fs::path file = base / ("schedule_" + method + ".csv");
        if (!fs::exists(file)) {
          out.push_back({"report", "report lists method " + method + " without a schedule"});
          continue;
        }
        Schedule schedule = read_schedule_csv(file.string());
        if (std::abs(schedule.total_profit - m.at("profit").get<double>()) > verify_tol)
          out.push_back({"report", "reported " + method + " profit differs from its schedule"});
        if (static_cast<int>(schedule.entries.size()) != m.at("served").get<int>())
          out.push_back({"report", "reported " + method + " served count differs"});
      }
    } catch (const json::exception& e) {
      out.push_back({"report", std::string("report.json unreadable: ") + e.what()});
    }
  }

  return out;
}

}  // namespace sdaas
