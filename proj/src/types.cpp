#include "sdaas/types.hpp"

#include <algorithm>

namespace sdaas {

double Swarm::min_battery() const {
  double lo = 1.0;
  for (const auto& d : drones) lo = std::min(lo, d.battery);
  return lo;
}

std::string join_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.code + ": " + v.detail;
  }
  return out;
}

}  // namespace sdaas
