#include "sdaas/schedule.hpp"

#include "sdaas/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace sdaas {

namespace {

constexpr int kB = OccupancyIndex::kBlock;
using LaneMask = std::array<std::int16_t, kB>;
constexpr std::int16_t kSink = -32768;  // drowns a lane in max reductions

// all-bits lane masks: kSuffix[o] activates lanes >= o, kPrefix[h] lanes < h.
// Partial-block ops always run over the full block with a constant trip
// count; masking replaces the variable loop bounds, so the loops vectorize
// and their exits never mispredict.
constexpr auto kSuffix = [] {
  std::array<LaneMask, kB + 1> t{};
  for (int o = 0; o <= kB; ++o)
    for (int i = o; i < kB; ++i) t[o][i] = -1;
  return t;
}();
constexpr auto kPrefix = [] {
  std::array<LaneMask, kB + 1> t{};
  for (int h = 0; h <= kB; ++h)
    for (int i = 0; i < h; ++i) t[h][i] = -1;
  return t;
}();

// add d to the lanes active under m1 & m2 and return their post-add max;
// inactive lanes sink below any real value
inline int masked_add_max(std::int16_t* cell, std::int16_t d, const std::int16_t* m1,
                          const std::int16_t* m2) {
  std::int16_t best = kSink;
  for (int i = 0; i < kB; ++i) {
    std::int16_t act = static_cast<std::int16_t>(m1[i] & m2[i]);
    cell[i] = static_cast<std::int16_t>(cell[i] + (d & act));
    best = std::max(best, static_cast<std::int16_t>(cell[i] | (~act & kSink)));
  }
  return best;
}

inline int masked_max(const std::int16_t* cell, const std::int16_t* m1, const std::int16_t* m2) {
  std::int16_t best = kSink;
  for (int i = 0; i < kB; ++i) {
    std::int16_t act = static_cast<std::int16_t>(m1[i] & m2[i]);
    best = std::max(best, static_cast<std::int16_t>(cell[i] | (~act & kSink)));
  }
  return best;
}

}  // namespace

std::vector<double> arrival_slots(const TimeWindow& window, double at, double granularity) {
  if (!(granularity > 0)) throw ValidationError("slot granularity must be positive");
  std::vector<double> slots;
  for (int k = 0;; ++k) {
    double t = window.st + k * granularity;
    if (t > window.et) break;
    if (t >= at) slots.push_back(t);  // otherwise the departure predates the day
  }
  return slots;
}

std::vector<ServiceOffer> make_offers(const std::vector<CompositionRecord>& records,
                                      const std::vector<Request>& requests,
                                      double slot_granularity) {
  std::unordered_map<RequestId, const Request*> by_id;
  for (const Request& r : requests) by_id[r.id] = &r;

  std::vector<ServiceOffer> offers;
  for (const CompositionRecord& rec : records) {
    if (!rec.eligible()) continue;
    auto it = by_id.find(rec.request_id);
    if (it == by_id.end())
      throw ValidationError("composition record for unknown request " +
                            std::to_string(rec.request_id));
    ServiceOffer offer;
    offer.request_id = rec.request_id;
    offer.at = rec.service->at;
    offer.rtt = rec.service->rtt;
    offer.profit = rec.service->profit;
    offer.drones = rec.swarm_size;
    offer.window = it->second->window;
    offer.slots = arrival_slots(offer.window, offer.at, slot_granularity);
    offers.push_back(std::move(offer));
  }
  return offers;
}

AllocEntry make_entry(const ServiceOffer& offer, double arrival) {
  AllocEntry e;
  e.request_id = offer.request_id;
  e.depart = arrival - offer.at;
  e.arrival = arrival;
  e.release = e.depart + offer.rtt;
  e.drones_used = offer.drones;
  e.profit = offer.profit;
  return e;
}

OccupancyIndex::OccupancyIndex(int fleet_size, std::vector<double> event_times)
    : fleet_(fleet_size), times_(std::move(event_times)) {
  std::sort(times_.begin(), times_.end());
  times_.erase(std::unique(times_.begin(), times_.end()), times_.end());
  std::size_t cells = times_.empty() ? 0 : times_.size() - 1;
  cells_ = static_cast<int>(cells);
  // pad to whole blocks so partial ops can always touch a full block
  occ_.assign((cells + kBlock - 1) / kBlock * kBlock, 0);
  blk_add_.assign(occ_.size() / kBlock, 0);
  blk_max_.assign(blk_add_.size(), 0);
}

int OccupancyIndex::coord(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t)
    throw ValidationError("occupancy query at unregistered time");
  return static_cast<int>(it - times_.begin());
}

void OccupancyIndex::refresh_block(int b) {
  int lo = b * kBlock;
  int hi = std::min(lo + kBlock, cells_);  // padding cells are not real
  int m = 0;
  for (int i = lo; i < hi; ++i) m = std::max(m, static_cast<int>(occ_[i]));
  blk_max_[b] = m + blk_add_[b];
}

bool OccupancyIndex::fits(double depart, double release, int drones) const {
  if (drones > fleet_) return false;
  // global-max shortcut: headroom everywhere means headroom on the range
  if (global_max_ + drones <= fleet_) return true;
  if (release <= depart) return true;
  return fits_at(coord(depart), coord(release), drones);
}

int OccupancyIndex::max_occupancy(double from, double to) const {
  int a = coord(from), b = coord(to);
  int m = 0;
  for (int i = a; i < b;) {
    if (i % kBlock == 0 && i + kBlock <= b) {
      m = std::max(m, blk_max_[i / kBlock]);
      i += kBlock;
    } else {
      m = std::max(m, occ_[i] + blk_add_[i / kBlock]);
      ++i;
    }
  }
  return m;
}

void OccupancyIndex::add(double depart, double release, int drones) {
  add_at(coord(depart), coord(release), drones);
}

void OccupancyIndex::remove(double depart, double release, int drones) {
  int a = coord(depart), b = coord(release);
  for (int i = a; i < b;) {
    if (i % kBlock == 0 && i + kBlock <= b) {
      blk_add_[i / kBlock] -= drones;
      blk_max_[i / kBlock] -= drones;
      i += kBlock;
    } else {
      occ_[i] = static_cast<std::int16_t>(occ_[i] - drones);
      ++i;
    }
  }
  if (a < b) {
    refresh_block(a / kBlock);
    refresh_block((b - 1) / kBlock);
  }
  // a removed cell may have held the max; recount (removal is rare)
  global_max_ = 0;
  for (int m : blk_max_) global_max_ = std::max(global_max_, m);
}

bool OccupancyIndex::fits_at(int lo, int hi, int drones) const {
  if (drones > fleet_) return false;
  if (global_max_ + drones <= fleet_) return true;
  if (lo >= hi) return true;
  int cap = fleet_ - drones;
  int b0 = lo / kBlock, b1 = (hi - 1) / kBlock;
  const std::int16_t* suf = kSuffix[lo - b0 * kBlock].data();
  const std::int16_t* pre = kPrefix[hi - b1 * kBlock].data();
  const std::int16_t* all = kSuffix[0].data();
  if (b0 == b1) return masked_max(occ_.data() + b0 * kBlock, suf, pre) + blk_add_[b0] <= cap;
  if (masked_max(occ_.data() + b0 * kBlock, suf, all) + blk_add_[b0] > cap) return false;
  for (int b = b0 + 1; b < b1; ++b)
    if (blk_max_[b] > cap) return false;
  return masked_max(occ_.data() + b1 * kBlock, all, pre) + blk_add_[b1] <= cap;
}

void OccupancyIndex::add_at(int lo, int hi, int drones) {
  if (lo >= hi) return;
  std::int16_t d = static_cast<std::int16_t>(drones);
  int b0 = lo / kBlock, b1 = (hi - 1) / kBlock;
  const std::int16_t* suf = kSuffix[lo - b0 * kBlock].data();
  const std::int16_t* pre = kPrefix[hi - b1 * kBlock].data();
  const std::int16_t* all = kSuffix[0].data();
  // adds never lower a block max, so touched-lane maxima are enough to
  // refresh blk_max_ incrementally
  int bm;
  if (b0 == b1) {
    bm = std::max(blk_max_[b0], masked_add_max(occ_.data() + b0 * kBlock, d, suf, pre) + blk_add_[b0]);
    blk_max_[b0] = bm;
  } else {
    bm = std::max(blk_max_[b0], masked_add_max(occ_.data() + b0 * kBlock, d, suf, all) + blk_add_[b0]);
    blk_max_[b0] = bm;
    for (int b = b0 + 1; b < b1; ++b) {
      blk_add_[b] += drones;
      bm = std::max(bm, blk_max_[b] += drones);
    }
    int tm = std::max(blk_max_[b1], masked_add_max(occ_.data() + b1 * kBlock, d, all, pre) + blk_add_[b1]);
    blk_max_[b1] = tm;
    bm = std::max(bm, tm);
  }
  global_max_ = std::max(global_max_, bm);
}

void OccupancyIndex::clear() {
  std::fill(occ_.begin(), occ_.end(), 0);
  std::fill(blk_add_.begin(), blk_add_.end(), 0);
  std::fill(blk_max_.begin(), blk_max_.end(), 0);
  global_max_ = 0;
}

std::vector<double> offer_event_times(const std::vector<ServiceOffer>& offers) {
  std::vector<double> times;
  for (const ServiceOffer& o : offers)
    for (double slot : o.slots) {
      double depart = slot - o.at;
      times.push_back(depart);
      times.push_back(depart + o.rtt);
    }
  return times;
}

std::vector<Violation> check_schedule(const Schedule& schedule,
                                      const std::vector<ServiceOffer>& offers,
                                      const ProviderConfig& cfg) {
  constexpr double tol = 1e-6;  // wide enough for values round-tripped via CSV
  std::vector<Violation> out;

  std::unordered_map<RequestId, const ServiceOffer*> by_id;
  for (const ServiceOffer& o : offers) by_id[o.request_id] = &o;

  std::unordered_set<RequestId> seen;
  for (const AllocEntry& e : schedule.entries) {
    std::string rid = "request " + std::to_string(e.request_id);
    auto it = by_id.find(e.request_id);
    if (it == by_id.end()) {
      out.push_back({"unknown_request", rid + " has no offer"});
      continue;
    }
    const ServiceOffer& o = *it->second;
    if (!seen.insert(e.request_id).second)
      out.push_back({"double_allocation", rid + " allocated twice"});
    if (e.depart < -tol) out.push_back({"negative_depart", rid + " departs before the day"});
    if (e.arrival < o.window.st - tol || e.arrival > o.window.et + tol)
      out.push_back({"window", rid + " arrives outside its window"});
    bool on_grid = false;
    for (double slot : o.slots)
      if (std::abs(slot - e.arrival) <= tol) on_grid = true;
    if (!on_grid) out.push_back({"off_grid", rid + " arrival is not a candidate slot"});
    if (std::abs(e.arrival - e.depart - o.at) > tol)
      out.push_back({"at_mismatch", rid + " arrival does not equal depart + at"});
    if (std::abs(e.release - e.depart - o.rtt) > tol)
      out.push_back({"rtt_mismatch", rid + " release does not equal depart + rtt"});
    if (e.drones_used != o.drones)
      out.push_back({"drones_mismatch", rid + " drone count differs from composition"});
    if (std::abs(e.profit - o.profit) > tol)
      out.push_back({"profit_mismatch", rid + " profit differs from composition"});
  }

  // instant-by-instant occupancy; [depart, release) makes releases free pads
  // before simultaneous departures
  struct Event {
    double t;
    int delta;
  };
  std::vector<Event> events;
  for (const AllocEntry& e : schedule.entries) {
    events.push_back({e.depart, e.drones_used});
    events.push_back({e.release, -e.drones_used});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.delta < b.delta;
  });
  int occupancy = 0;
  for (const Event& ev : events) {
    occupancy += ev.delta;
    if (occupancy > cfg.fleet_size) {
      out.push_back({"capacity",
                     "occupancy " + std::to_string(occupancy) + " exceeds fleet of " +
                         std::to_string(cfg.fleet_size) + " at t=" + csv::num(ev.t)});
      break;
    }
  }

  double total = 0;
  for (const AllocEntry& e : schedule.entries) total += e.profit;
  if (std::abs(total - schedule.total_profit) > tol)
    out.push_back({"total_profit", "stated total differs from the entry sum"});

  return out;
}

void write_schedule_csv(const std::string& path, const Schedule& schedule) {
  csv::Writer w(path);
  w.row({"request_id", "depart", "arrival", "release", "drones_used", "profit"});
  for (const AllocEntry& e : schedule.entries)
    w.row({std::to_string(e.request_id), csv::num(e.depart), csv::num(e.arrival),
           csv::num(e.release), std::to_string(e.drones_used), csv::num(e.profit)});
  w.close();
}

Schedule read_schedule_csv(const std::string& path) {
  Schedule s;
  for (const auto& row : csv::read_rows(path, "request_id,depart,arrival,release,drones_used,profit")) {
    if (row.size() != 6) throw ParseError(path + ": expected 6 fields per row");
    AllocEntry e;
    e.request_id = csv::to_int(row[0], path);
    e.depart = csv::to_double(row[1], path);
    e.arrival = csv::to_double(row[2], path);
    e.release = csv::to_double(row[3], path);
    e.drones_used = static_cast<int>(csv::to_int(row[4], path));
    e.profit = csv::to_double(row[5], path);
    s.entries.push_back(e);
    s.total_profit += e.profit;
  }
  return s;
}

}  // namespace sdaas
