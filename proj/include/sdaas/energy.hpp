#pragma once

#include "sdaas/types.hpp"

namespace sdaas {

class SkywayNetwork;

struct EnergyParams {
  double rate_empty = 0.05;         // battery fraction per km, unloaded
  double payload_factor = 1.0;      // rate multiplier added at full payload
  double full_charge_time = 3600;   // seconds, empty to full
  double speed = 10.0;              // m/s cruise
  double payload_capacity = 2.5;    // kg a single drone may carry
  double reserve = 0.0;             // battery fraction never spent
};

/// Battery fraction burned flying `dist_m` meters with `payload_kg` aboard.
/// Linear in distance and payload.
double energy_consumed(double dist_m, double payload_kg, const EnergyParams& params);

/// True iff every drone in the swarm can fly `dist_m` on its current charge,
/// keeping `params.reserve` in hand. The swarm moves as a unit.
bool can_reach(const Swarm& swarm, double dist_m, const EnergyParams& params);

/// Seconds to charge one drone from its current level to `target_level`
/// (linear charging curve).
double charge_time(const Drone& drone, double target_level, const EnergyParams& params);

/// Scenario-level sanity: every parameter positive and every single edge
/// traversable on a full battery when unloaded.
void validate_energy(const EnergyParams& params, const SkywayNetwork& net);

}  // namespace sdaas
