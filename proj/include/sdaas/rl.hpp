#pragma once

#include "sdaas/schedule.hpp"
#include "sdaas/types.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sdaas {

struct RlParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.8;  // of the episode budget
  int episodes = 20000;
  double slot_granularity = 600.0;      // seconds between arrival slots
  std::string state_encoder = "auto";   // auto | bitmask | profit_bins
  double profit_bin_width = 0.0;        // 0 = derived from the instance
};

/// Allocating one request at one arrival slot.
struct Action {
  int offer = 0;  // index into the env's offer list
  RequestId request_id = 0;
  double arrival = 0;
  double depart = 0;
  double release = 0;
  int drones = 0;
  double profit = 0;
};

struct EnvState {
  std::vector<std::uint8_t> allocated;  // by offer index
  int allocated_count = 0;
  double accumulated_profit = 0;
};

using StateKey = std::uint64_t;

class StateEncoder {
public:
  virtual ~StateEncoder() = default;
  virtual StateKey encode(const EnvState& state) const = 0;
  virtual std::string name() const = 0;
};

/// Exact encoder: bitmask of allocated offers. Meaningful only while the
/// offer count fits the key width.
class BitmaskEncoder : public StateEncoder {
public:
  explicit BitmaskEncoder(int offer_count);
  StateKey encode(const EnvState& state) const override;
  std::string name() const override { return "bitmask"; }
};

/// Accumulated profit discretized into fixed-width bins.
class ProfitBinEncoder : public StateEncoder {
public:
  explicit ProfitBinEncoder(double bin_width);
  StateKey encode(const EnvState& state) const override;
  std::string name() const override { return "profit_bins"; }

private:
  double width_;
};

std::unique_ptr<StateEncoder> make_encoder(const RlParams& params,
                                           const std::vector<ServiceOffer>& offers);

/// Allocation environment: presents only actions that keep the schedule
/// capacity-feasible, rewards each allocation with the request's profit.
class AllocationEnv {
public:
  AllocationEnv(std::vector<ServiceOffer> offers, const ProviderConfig& cfg);

  const std::vector<ServiceOffer>& offers() const { return offers_; }
  const std::vector<Action>& actions() const { return actions_; }
  const EnvState& state() const { return state_; }

  void reset();
  bool is_valid(int action) const;
  /// Cheap negative filter: false means proven invalid this episode, true
  /// means unknown (is_valid may still reject).
  bool maybe_valid(int action) const { return hot_[action].dead == 0; }
  /// Full recount of the valid actions, ascending by action index. Empty
  /// means the episode is over.
  std::vector<int> valid_actions() const;
  /// Lowest valid action index at or after `from`, or -1.
  int first_valid(int from = 0) const;
  /// Uniform draw over the currently valid actions, or -1 when the episode
  /// is over. Rejection-samples the not-yet-dead set, so conditioning on
  /// success the draw is uniform over the valid subset.
  int sample_valid(std::mt19937_64& rng) const;
  /// Applies a valid action and returns its reward. Rejects invalid actions.
  double step(int action);

  Schedule schedule() const;

private:
  std::vector<ServiceOffer> offers_;
  std::vector<Action> actions_;
  std::vector<std::vector<int>> actions_of_offer_;
  ProviderConfig cfg_;
  OccupancyIndex occupancy_;
  EnvState state_;
  std::vector<AllocEntry> entries_;

  // Everything a validity probe reads, packed into 16 bytes so one probe
  // costs one cache line. `lo`/`hi`/`offer`/`drones` are fixed at
  // construction; `dead` and `ver` are episode-local caches (below).
  struct ActionHot {
    int lo = 0, hi = 0;     // occupancy coordinates of the busy interval
    std::uint32_t ver = 0;  // mutation stamp of the last validity proof
    std::uint16_t offer = 0;
    std::uint8_t dead = 0;  // 1 = proven invalid this episode
    std::uint8_t drones = 0;
  };
  // Offer-contiguous action index ranges and offers in action order.
  std::vector<int> range_lo_, range_hi_;
  std::vector<int> offer_order_, offer_rank_;
  // dead is an optimistic flag: 0 = not yet proven invalid this episode.
  // Allocations and occupancy only grow between resets, so invalidity is
  // absorbing; is_valid memoizes each proof of death and an action dies at
  // most once per episode. Conversely a positive verdict holds until the
  // next mutation, so ver stamps it with the mutation counter and repeat
  // probes (e.g. the step() guard right after selection) skip the
  // occupancy query. A Fenwick tree over offers carries the alive count of
  // each unallocated offer: allocating an offer retires all its remaining
  // slots in one update, so terminal detection only probes actions of the
  // few offers still open. Mutation is caching only, hence mutable;
  // concurrent use of one env is not supported.
  mutable std::vector<ActionHot> hot_;
  mutable std::vector<int> offer_alive_;
  mutable std::vector<int> offer_tree_;  // Fenwick over offers, 1-based
  mutable int sampleable_ = 0;
  std::uint32_t occ_ver_ = 1;
  void kill(int action) const;
  int weighted_offer(int& k) const;  // k-th by weight; k becomes the offset
};

class QTable {
public:
  double get(StateKey s, int a) const;
  /// Max over the row clamped at 0, i.e. the max over all actions with
  /// missing entries reading as 0. O(1) via the heap root.
  double row_max(StateKey s) const;
  void set(StateKey s, int a, double v);
  /// q(s,a) += alpha * (target - q(s,a)) in a single row lookup.
  void blend(StateKey s, int a, double alpha, double target);
  std::size_t state_count() const { return rows_.size(); }

  /// One row = the touched entries as an implicit max-heap on (value desc,
  /// action asc) plus a 16-bit action -> heap slot index; missing entries
  /// read 0. An update is an O(log row) sift, the bootstrap max is the
  /// root, and greedy selection enumerates entries best-first without
  /// scanning the whole row. The compact layout matters: training keeps the
  /// entire table hot, so bytes per entry translate directly into cache
  /// misses (float values are well below the update noise of the learning
  /// rate, and 16-bit slots bound the row width at 65534 actions).
  struct Row {
    std::vector<std::pair<float, int>> heap;  // (value, action) by heap slot
    std::vector<std::uint16_t> pos;           // action -> heap slot
  };
  static constexpr std::uint16_t kAbsent = 0xffff;
  /// Pointer valid until the next set/blend on an unseen state.
  const Row* row(StateKey s) const;

private:
  static constexpr std::uint32_t kNoRow = 0xffffffff;
  struct Slot {
    StateKey key = 0;
    std::uint32_t row = kNoRow;
  };
  // open addressing, linear probing, power-of-two capacity: a lookup is one
  // multiply plus a near-certain single probe into a flat array, where the
  // standard node-based map pays a hardware divide and a pointer chase.
  // Fibonacci mixing spreads the small integer keys the encoders emit.
  // Rows live densely in insertion order; nothing is ever erased.
  std::vector<Slot> table_;
  std::vector<Row> rows_;
  int shift_ = 0;  // 64 - log2(table size)
  // one-entry lookup memo (by row index, so it survives growth): selection
  // and the bootstrap read the same row back to back each transition.
  // Caching only; a single table must not be shared across threads.
  mutable StateKey memo_key_ = 0;
  mutable std::uint32_t memo_idx_ = kNoRow;
  std::uint32_t find_idx(StateKey s) const;
  Row* find_row(StateKey s) const;
  Row& touch(StateKey s, int a);  // row with pos sized past a
  void apply(Row& row, int a, float nv);
  void grow();
  static void sift_up(Row& row, int i);
  static void sift_down(Row& row, int i);
};

/// One Watkins backup: Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
/// A terminal next state bootstraps with 0.
void q_update(QTable& q, StateKey s, int a, double reward, StateKey next, bool terminal,
              double alpha, double gamma);

double epsilon_at(const RlParams& params, int episode);

struct TrainResult {
  QTable q;
  std::vector<double> returns;  // per-episode return
  std::string encoder;
};

/// Epsilon-greedy tabular training over the allocation environment.
/// Deterministic for a fixed (offers, params, seed).
TrainResult train(const std::vector<ServiceOffer>& offers, const ProviderConfig& cfg,
                  const RlParams& params, std::uint64_t seed);

/// Greedy (epsilon = 0) rollout of a trained table; ties go to the lowest
/// (request id, arrival slot).
Schedule extract_schedule(const QTable& q, const std::vector<ServiceOffer>& offers,
                          const ProviderConfig& cfg, const RlParams& params);

void write_rewards_csv(const std::string& path, const std::vector<double>& returns);

}  // namespace sdaas
