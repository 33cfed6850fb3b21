#pragma once

#include "sdaas/composer.hpp"
#include "sdaas/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sdaas {

/// One allocated request: when the swarm departs, delivers and frees up.
struct AllocEntry {
  RequestId request_id = 0;
  double depart = 0;   // seconds
  double arrival = 0;  // depart + at
  double release = 0;  // depart + rtt; drones reusable afterwards
  int drones_used = 0;
  double profit = 0;
};

struct Schedule {
  std::vector<AllocEntry> entries;
  double total_profit = 0;
};

/// Allocator-facing view of one eligible request: composed timings joined
/// with the delivery window and the candidate arrival slots.
struct ServiceOffer {
  RequestId request_id = 0;
  double at = 0;
  double rtt = 0;
  double profit = 0;
  int drones = 0;
  TimeWindow window;
  std::vector<double> slots;  // candidate arrival times, ascending
};

/// Arrival candidates window.st + k*granularity within [st, et], keeping only
/// slots whose implied departure is not before the day starts.
std::vector<double> arrival_slots(const TimeWindow& window, double at, double granularity);

/// Offers for every eligible record (servable, positive profit), in the order
/// the records arrive. Offers may carry an empty slot list.
std::vector<ServiceOffer> make_offers(const std::vector<CompositionRecord>& records,
                                      const std::vector<Request>& requests,
                                      double slot_granularity);

AllocEntry make_entry(const ServiceOffer& offer, double arrival);

/// Exact drone-occupancy index over a fixed set of candidate intervals:
/// one counter per cell between consecutive event times, with the cells
/// grouped into fixed-size blocks carrying a pending add and a block max.
/// Long intervals touch whole blocks in O(1) each, so updates and queries
/// cost about sqrt of the grid instead of its length, and the whole index
/// fits in a few cache lines. Partial blocks are processed at full width
/// under precomputed lane masks, which keeps the cell loops vectorized and
/// free of data-dependent branches. A running global max accepts most
/// queries outright, and rejections exit at the first saturated block. Intervals passed to fits/add must use coordinates
/// registered upfront.
class OccupancyIndex {
public:
  static constexpr int kBlock = 16;  // cells per block

  OccupancyIndex(int fleet_size, std::vector<double> event_times);

  int fleet_size() const { return fleet_; }
  bool fits(double depart, double release, int drones) const;
  int max_occupancy(double from, double to) const;  // over [from, to)
  void add(double depart, double release, int drones);
  void remove(double depart, double release, int drones);
  void clear();

  // coordinate-level access for hot loops that precompute their intervals
  int coord_of(double t) const { return coord(t); }
  bool fits_at(int lo, int hi, int drones) const;
  void add_at(int lo, int hi, int drones);

private:
  int coord(double t) const;
  void refresh_block(int b);

  int fleet_ = 0;
  int cells_ = 0;                 // real cell count; occ_ is padded to kBlock
  std::vector<double> times_;     // sorted unique event times
  std::vector<std::int16_t> occ_; // cell base value, excluding the block add
  std::vector<int> blk_add_;      // pending add applied to a whole block
  std::vector<int> blk_max_;      // max true value within the block
  int global_max_ = 0;            // max over all cells
};

/// Event times needed to index every candidate interval of these offers.
std::vector<double> offer_event_times(const std::vector<ServiceOffer>& offers);

/// Re-derives every Schedule invariant from scratch: known requests, single
/// allocation, window safety, AT/RTT consistency, instant-by-instant capacity
/// and the profit total. Returns the violations found.
std::vector<Violation> check_schedule(const Schedule& schedule,
                                      const std::vector<ServiceOffer>& offers,
                                      const ProviderConfig& cfg);

void write_schedule_csv(const std::string& path, const Schedule& schedule);
Schedule read_schedule_csv(const std::string& path);

}  // namespace sdaas
