#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdaas {

using NodeId = std::int64_t;
using RequestId = std::int64_t;

/// Malformed input file (bad row, missing column, unreadable path).
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Structurally parsed input that breaks a model invariant.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A request that no feasible trip can serve.
class UnservableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive search asked to run beyond its instance bounds.
class SizeLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scenario that cannot be realized (e.g. connectivity never reached).
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rooftop recharging station in the skyway network.
struct Node {
  NodeId id = 0;
  double x = 0;  // meters, planar frame
  double y = 0;
  int pads = 0;  // recharging pads, >= 0
};

/// Undirected line-of-sight flight segment between two nodes.
struct Segment {
  NodeId from = 0;
  NodeId to = 0;
  double dist = 0;  // meters, > 0
};

struct TimeWindow {
  double st = 0;  // seconds since day start
  double et = 0;
  double width() const { return et - st; }
};

struct Drone {
  int id = 0;
  double battery = 1.0;  // fraction of capacity, [0, 1]
  double payload = 0.0;  // kg
};

/// A static swarm: drones fly together and share one position.
struct Swarm {
  std::vector<Drone> drones;
  NodeId at_node = 0;

  int size() const { return static_cast<int>(drones.size()); }
  double min_battery() const;
};

/// Consumer delivery request: packages to one destination inside a window.
struct Request {
  RequestId id = 0;
  NodeId dest = 0;
  std::vector<double> packages;  // kg, one drone per package
  TimeWindow window;
};

struct ProviderConfig {
  int fleet_size = 30;        // drones owned
  NodeId source = 0;          // canonical depot node
  int max_swarm_size = 5;     // m, packages per request cap
  double day_length = 8 * 3600.0;
  double max_package_weight = 1.4;  // kg
  bool congestion = true;     // model worst-case pad contention
};

struct PricingParams {
  double revenue_per_package = 10.0;
  double cost_per_drone_second = 0.001;
};

struct Violation {
  std::string code;
  std::string detail;
};

std::string join_violations(const std::vector<Violation>& violations);

}  // namespace sdaas
