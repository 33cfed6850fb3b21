#include "sdaas/composer.hpp"

#include "sdaas/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdaas {

int contending_swarm_size(const ProviderConfig& cfg, int swarm_size) {
  if (!cfg.congestion) return 0;
  return std::max(0, std::min(cfg.max_swarm_size, cfg.fleet_size - swarm_size));
}

double node_time(const Swarm& swarm, const Node& node, const EnergyParams& params,
                 const ProviderConfig& cfg) {
  double ct_max = 0;
  for (const Drone& d : swarm.drones) ct_max = std::max(ct_max, charge_time(d, 1.0, params));
  if (ct_max == 0) return 0;  // nobody needs a pad
  if (node.pads <= 0)
    throw UnservableError("recharge stop at pad-less node " + std::to_string(node.id));
  // worst case: a contending swarm shares the pads and everyone charges in
  // parallel rounds of our longest individual charge
  int queued = swarm.size() + contending_swarm_size(cfg, swarm.size());
  int rounds = (queued + node.pads - 1) / node.pads;
  return rounds * ct_max;
}

namespace {

void drain(Swarm& swarm, double dist_m, const EnergyParams& params) {
  for (Drone& d : swarm.drones) d.battery -= energy_consumed(dist_m, d.payload, params);
}

void charge_full(Swarm& swarm) {
  for (Drone& d : swarm.drones) d.battery = 1.0;
}

}  // namespace

Leg compose_leg(const SkywayNetwork& net, const DistanceTable& to_target, Swarm& swarm,
                const EnergyParams& params, const ProviderConfig& cfg) {
  Leg leg;
  int cur = net.index_of(swarm.at_node);
  leg.path.push_back(cur);
  std::vector<char> visited(net.size(), 0);
  visited[cur] = 1;

  while (cur != to_target.target) {
    // fly the whole shortest path nonstop whenever the charge allows it
    double direct = to_target.meters_at(cur);
    if (can_reach(swarm, direct, params)) {
      std::vector<int> flight = shortest_path_from(to_target, cur);
      drain(swarm, direct, params);
      leg.duration += direct / params.speed;
      leg.path.insert(leg.path.end(), flight.begin() + 1, flight.end());
      cur = to_target.target;
      break;
    }

    // otherwise hop to the unvisited neighbor with the least
    // travel + recharge + heuristic remaining time
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    double best_edge = 0, best_nt = 0;
    for (const Adjacent& a : net.neighbors(cur)) {
      if (visited[a.node]) continue;
      if (net.node_at(a.node).pads <= 0) continue;  // cannot serve as a stop
      if (!can_reach(swarm, a.dist, params)) continue;
      Swarm probe = swarm;  // batteries after the hop set the charge time
      drain(probe, a.dist, params);
      double nt = node_time(probe, net.node_at(a.node), params, cfg);
      double score = a.dist / params.speed + nt + to_target.meters_at(a.node) / params.speed;
      if (score < best_score) {  // strict: ties keep the lowest-id neighbor
        best_score = score;
        best = a.node;
        best_edge = a.dist;
        best_nt = nt;
      }
    }

    if (best < 0) {
      // stuck: top up here once and retry; stuck on a full charge is final
      if (swarm.min_battery() < 1.0) {
        leg.duration += node_time(swarm, net.node_at(cur), params, cfg);
        charge_full(swarm);
        leg.stops.push_back(cur);
        continue;
      }
      throw UnservableError("swarm stuck at node " +
                            std::to_string(net.node_at(cur).id));
    }

    drain(swarm, best_edge, params);
    leg.duration += best_edge / params.speed + best_nt;
    charge_full(swarm);
    visited[best] = 1;
    leg.path.push_back(best);
    leg.stops.push_back(best);
    cur = best;
  }

  swarm.at_node = net.node_at(cur).id;
  return leg;
}

ComposedService compose(const SkywayNetwork& net, const Request& request,
                        const EnergyParams& params, const PricingParams& pricing,
                        const ProviderConfig& cfg) {
  auto violations = validate_request(request, net, cfg);
  if (!violations.empty()) throw ValidationError(join_violations(violations));

  Swarm swarm;
  swarm.at_node = cfg.source;
  for (std::size_t i = 0; i < request.packages.size(); ++i)
    swarm.drones.push_back({static_cast<int>(i), 1.0, request.packages[i]});

  DistanceTable to_dest = shortest_path_table(net, request.dest);
  DistanceTable to_source = shortest_path_table(net, cfg.source);

  Leg out = compose_leg(net, to_dest, swarm, params, cfg);
  for (Drone& d : swarm.drones) d.payload = 0;  // delivery
  Leg back = compose_leg(net, to_source, swarm, params, cfg);
  // the trip always ends with a full recharge at the source
  double source_charge = node_time(swarm, net.node(cfg.source), params, cfg);

  ComposedService service;
  service.request_id = request.id;
  service.swarm_size = swarm.size();
  service.at = out.duration;
  service.rtt = out.duration + back.duration + source_charge;
  service.profit = profit_of(service.swarm_size, service.rtt, pricing);
  for (int i : out.path) service.out_path.push_back(net.node_at(i).id);
  for (int i : back.path) service.back_path.push_back(net.node_at(i).id);
  for (int i : out.stops) service.out_stops.push_back(net.node_at(i).id);
  for (int i : back.stops) service.back_stops.push_back(net.node_at(i).id);
  return service;
}

double profit_of(int swarm_size, double rtt, const PricingParams& pricing) {
  return pricing.revenue_per_package * swarm_size -
         pricing.cost_per_drone_second * swarm_size * rtt;
}

std::vector<CompositionRecord> compose_all(const SkywayNetwork& net,
                                           const std::vector<Request>& requests,
                                           const EnergyParams& params,
                                           const PricingParams& pricing,
                                           const ProviderConfig& cfg) {
  std::vector<CompositionRecord> records;
  records.reserve(requests.size());
  for (const Request& r : requests) {
    CompositionRecord rec;
    rec.request_id = r.id;
    rec.swarm_size = static_cast<int>(r.packages.size());
    auto violations = validate_request(r, net, cfg);
    if (!violations.empty()) {
      rec.failure = join_violations(violations);
    } else {
      try {
        rec.service = compose(net, r, params, pricing, cfg);
      } catch (const UnservableError& e) {
        rec.failure = e.what();
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

std::string join_path(const std::vector<NodeId>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '|';
    out += std::to_string(path[i]);
  }
  return out;
}

}  // namespace

void write_compose_csv(const std::string& path,
                       const std::vector<CompositionRecord>& records) {
  csv::Writer w(path);
  w.row({"request_id", "swarm_size", "at", "rtt", "profit", "out_path", "back_path"});
  for (const CompositionRecord& rec : records) {
    if (rec.servable()) {
      const ComposedService& s = *rec.service;
      w.row({std::to_string(rec.request_id), std::to_string(rec.swarm_size),
             csv::num(s.at), csv::num(s.rtt), csv::num(s.profit), join_path(s.out_path),
             join_path(s.back_path)});
    } else {
      // unservable rows keep the id and size, everything else stays empty
      w.row({std::to_string(rec.request_id), std::to_string(rec.swarm_size), "", "", "",
             "", ""});
    }
  }
  w.close();
}

}  // namespace sdaas
