#include "sdaas/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace sdaas {

namespace {

// canonical comparison key for profit ties: allocated ids ascending, each
// paired with its arrival slot
std::vector<std::pair<RequestId, double>> tie_key(const std::vector<ServiceOffer>& offers,
                                                  const std::vector<double>& chosen) {
  std::vector<std::pair<RequestId, double>> key;
  for (std::size_t i = 0; i < offers.size(); ++i)
    if (chosen[i] >= 0) key.push_back({offers[i].request_id, chosen[i]});
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

Schedule oracle_optimal(const std::vector<ServiceOffer>& offers, const ProviderConfig& cfg,
                        const OracleLimits& limits) {
  int n = static_cast<int>(offers.size());
  if (n > limits.max_requests)
    throw SizeLimitError("oracle bounded to " + std::to_string(limits.max_requests) +
                         " requests, got " + std::to_string(n));
  for (const ServiceOffer& o : offers)
    if (static_cast<int>(o.slots.size()) > limits.max_slots)
      throw SizeLimitError("oracle bounded to " + std::to_string(limits.max_slots) +
                           " slots per request");

  // profit still reachable from offer i onwards, for pruning
  std::vector<double> suffix(n + 1, 0);
  for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + offers[i].profit;

  OccupancyIndex occupancy(cfg.fleet_size, offer_event_times(offers));
  std::vector<double> chosen(n, -1);  // arrival, or -1 for skipped
  double best_profit = 0;             // the empty schedule is a valid incumbent
  std::vector<double> best = chosen;

  constexpr double eps = 1e-9;
  std::function<void(int, double)> walk = [&](int i, double profit) {
    if (profit + suffix[i] < best_profit - eps) return;
    if (i == n) {
      if (profit > best_profit + eps) {
        best_profit = profit;
        best = chosen;
      } else if (profit > best_profit - eps &&
                 tie_key(offers, chosen) < tie_key(offers, best)) {
        best_profit = std::max(best_profit, profit);
        best = chosen;
      }
      return;
    }
    const ServiceOffer& o = offers[i];
    for (double slot : o.slots) {
      double depart = slot - o.at;
      double release = depart + o.rtt;
      if (!occupancy.fits(depart, release, o.drones)) continue;
      occupancy.add(depart, release, o.drones);
      chosen[i] = slot;
      walk(i + 1, profit + o.profit);
      chosen[i] = -1;
      occupancy.remove(depart, release, o.drones);
    }
    walk(i + 1, profit);  // skip branch
  };
  walk(0, 0);

  Schedule schedule;
  for (int i = 0; i < n; ++i) {
    if (best[i] < 0) continue;
    schedule.entries.push_back(make_entry(offers[i], best[i]));
    schedule.total_profit += offers[i].profit;
  }
  return schedule;
}

}  // namespace sdaas
