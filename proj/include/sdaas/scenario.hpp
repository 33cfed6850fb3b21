#pragma once

#include "sdaas/energy.hpp"
#include "sdaas/network.hpp"
#include "sdaas/rl.hpp"
#include "sdaas/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdaas {

struct GeneratorConfig {
  int n_nodes = 129;
  int requests = 50;
  int fleet_size = 30;
  std::uint64_t seed = 1;
  double area = 8000.0;  // side of the square the nodes live in, meters
  int pad_min = 1;
  int pad_max = 4;
  int windows = 8;  // delivery windows per day
  double window_seconds = 3600.0;
  int max_swarm_size = 5;
  double max_package_weight = 1.4;
};

/// Everything one experiment needs: the network, the fleet and model
/// parameters, and the day's request batch. The seed fixes every draw.
struct Scenario {
  std::uint64_t seed = 1;
  ProviderConfig provider;
  EnergyParams energy;
  PricingParams pricing;
  RlParams rl;
  SkywayNetwork network;
  std::vector<Request> requests;
  std::optional<GeneratorConfig> generator;  // present for generated scenarios
};

/// Deterministic random-geometric scenario: connected network, random pads,
/// one source, and `requests` synthesized delivery requests.
Scenario generate_scenario(const GeneratorConfig& gen);

/// Request batch for an existing network, drawn from the generator's request
/// stream. `count` requests; a longer batch extends a shorter one.
std::vector<Request> generate_requests(const SkywayNetwork& net, const GeneratorConfig& gen,
                                       int count, NodeId source);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Cross-field checks: provider config consistent, energy parameters sane for
/// this network, every request well formed.
std::vector<Violation> validate_scenario(const Scenario& scenario);

}  // namespace sdaas
