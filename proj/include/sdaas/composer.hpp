#pragma once

#include "sdaas/energy.hpp"
#include "sdaas/network.hpp"
#include "sdaas/types.hpp"

#include <optional>
#include <vector>

namespace sdaas {

/// One request's composed round trip: paths, worst-case timings, profit.
struct ComposedService {
  RequestId request_id = 0;
  std::vector<NodeId> out_path;    // source .. dest, every node overflown
  std::vector<NodeId> back_path;   // dest .. source
  std::vector<NodeId> out_stops;   // charge stops on the way out
  std::vector<NodeId> back_stops;  // charge stops on the way back (may start with dest)
  double at = 0;                   // seconds, departure to last package delivered
  double rtt = 0;                  // seconds, includes the final source recharge
  double profit = 0;
  int swarm_size = 0;
};

/// Size of the swarm assumed to contend for pads at a node.
int contending_swarm_size(const ProviderConfig& cfg, int swarm_size);

/// Worst-case charging plus waiting time for the swarm at `node`: the
/// contending swarm shares the pads, everyone charges in parallel rounds of
/// the swarm's longest individual charge.
double node_time(const Swarm& swarm, const Node& node, const EnergyParams& params,
                 const ProviderConfig& cfg);

/// One leg of the trip as a committed greedy walk. Flies direct along the
/// shortest path whenever the whole swarm can make it; otherwise hops to the
/// neighbor with the least travel + node + heuristic time and charges fully
/// there. Mutates the swarm (position, batteries). Throws UnservableError
/// when stuck.
struct Leg {
  std::vector<int> path;   // dense indices, starts at the leg's origin
  std::vector<int> stops;  // dense indices of charge stops (may include origin)
  double duration = 0;     // seconds
};

Leg compose_leg(const SkywayNetwork& net, const DistanceTable& to_target, Swarm& swarm,
                const EnergyParams& params, const ProviderConfig& cfg);

/// Full round trip for one request: outbound leg, delivery, return leg and
/// the final recharge at the source. Throws UnservableError when no feasible
/// trip exists.
ComposedService compose(const SkywayNetwork& net, const Request& request,
                        const EnergyParams& params, const PricingParams& pricing,
                        const ProviderConfig& cfg);

double profit_of(int swarm_size, double rtt, const PricingParams& pricing);

/// Per-request composition outcome. Unservable requests carry the failure
/// reason instead of a service.
struct CompositionRecord {
  RequestId request_id = 0;
  int swarm_size = 0;
  std::optional<ComposedService> service;
  std::string failure;

  bool servable() const { return service.has_value(); }
  bool eligible() const { return servable() && service->profit > 0; }
};

std::vector<CompositionRecord> compose_all(const SkywayNetwork& net,
                                           const std::vector<Request>& requests,
                                           const EnergyParams& params,
                                           const PricingParams& pricing,
                                           const ProviderConfig& cfg);

void write_compose_csv(const std::string& path, const std::vector<CompositionRecord>& records);

}  // namespace sdaas
