#include "sdaas/energy.hpp"

#include "sdaas/network.hpp"

namespace sdaas {

double energy_consumed(double dist_m, double payload_kg, const EnergyParams& params) {
  double load = payload_kg / params.payload_capacity;
  return params.rate_empty * (1.0 + params.payload_factor * load) * (dist_m / 1000.0);
}

bool can_reach(const Swarm& swarm, double dist_m, const EnergyParams& params) {
  for (const Drone& d : swarm.drones) {
    double need = energy_consumed(dist_m, d.payload, params);
    if (need > d.battery - params.reserve) return false;
  }
  return true;
}

double charge_time(const Drone& drone, double target_level, const EnergyParams& params) {
  if (target_level <= drone.battery) return 0;
  return (target_level - drone.battery) * params.full_charge_time;
}

void validate_energy(const EnergyParams& params, const SkywayNetwork& net) {
  if (!(params.rate_empty > 0)) throw ValidationError("rate_empty must be positive");
  if (params.payload_factor < 0) throw ValidationError("payload_factor must be >= 0");
  if (!(params.full_charge_time > 0))
    throw ValidationError("full_charge_time must be positive");
  if (!(params.speed > 0)) throw ValidationError("speed must be positive");
  if (!(params.payload_capacity > 0))
    throw ValidationError("payload_capacity must be positive");
  if (params.reserve < 0 || params.reserve >= 1)
    throw ValidationError("reserve must lie in [0, 1)");

  // a drone that cannot cross the longest edge unloaded can never leave
  double worst = energy_consumed(net.longest_edge(), 0, params);
  if (worst > 1.0 - params.reserve)
    throw ValidationError("longest segment (" + std::to_string(net.longest_edge()) +
                          " m) exceeds unloaded range");
}

}  // namespace sdaas
