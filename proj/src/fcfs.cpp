#include "sdaas/fcfs.hpp"

#include "sdaas/csv.hpp"

#include <unordered_map>

namespace sdaas {

FcfsResult allocate_fcfs(const std::vector<CompositionRecord>& records,
                         const std::vector<Request>& requests, const ProviderConfig& cfg,
                         double slot_granularity) {
  std::vector<ServiceOffer> offers = make_offers(records, requests, slot_granularity);
  std::unordered_map<RequestId, const ServiceOffer*> offer_of;
  for (const ServiceOffer& o : offers) offer_of[o.request_id] = &o;

  OccupancyIndex occupancy(cfg.fleet_size, offer_event_times(offers));
  FcfsResult result;
  for (const CompositionRecord& rec : records) {  // record order = arrival order
    if (!rec.servable()) {
      result.skipped.push_back({rec.request_id, "unservable: " + rec.failure});
      continue;
    }
    if (!rec.eligible()) {
      result.skipped.push_back({rec.request_id, "non-positive profit"});
      continue;
    }
    const ServiceOffer& offer = *offer_of.at(rec.request_id);
    bool placed = false;
    for (double slot : offer.slots) {  // ascending: earliest feasible wins
      double depart = slot - offer.at;
      double release = depart + offer.rtt;
      if (occupancy.fits(depart, release, offer.drones)) {
        occupancy.add(depart, release, offer.drones);
        result.schedule.entries.push_back(make_entry(offer, slot));
        result.schedule.total_profit += offer.profit;
        placed = true;
        break;
      }
    }
    if (!placed)
      result.skipped.push_back({rec.request_id, offer.slots.empty()
                                                    ? "no slot allows an in-day departure"
                                                    : "no capacity-feasible slot"});
  }
  return result;
}

void write_skipped_csv(const std::string& path,
                       const std::vector<std::pair<RequestId, std::string>>& skipped) {
  csv::Writer w(path);
  w.row({"request_id", "reason"});
  // reasons hold no commas by construction, so plain CSV stays parseable
  for (const auto& [id, reason] : skipped) w.row({std::to_string(id), reason});
  w.close();
}

}  // namespace sdaas
