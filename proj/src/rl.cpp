#include "sdaas/rl.hpp"

#include "sdaas/csv.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace sdaas {

BitmaskEncoder::BitmaskEncoder(int offer_count) {
  if (offer_count > 64)
    throw ValidationError("bitmask state encoder supports at most 64 offers, got " +
                          std::to_string(offer_count));
}

StateKey BitmaskEncoder::encode(const EnvState& state) const {
  StateKey key = 0;
  for (std::size_t i = 0; i < state.allocated.size(); ++i)
    if (state.allocated[i]) key |= StateKey{1} << i;
  return key;
}

ProfitBinEncoder::ProfitBinEncoder(double bin_width) : width_(bin_width) {
  if (!(width_ > 0)) throw ValidationError("profit bin width must be positive");
}

StateKey ProfitBinEncoder::encode(const EnvState& state) const {
  return static_cast<StateKey>(std::floor(state.accumulated_profit / width_));
}

std::unique_ptr<StateEncoder> make_encoder(const RlParams& params,
                                           const std::vector<ServiceOffer>& offers) {
  std::string kind = params.state_encoder;
  if (kind == "auto") kind = offers.size() <= 20 ? "bitmask" : "profit_bins";
  if (kind == "bitmask") return std::make_unique<BitmaskEncoder>(static_cast<int>(offers.size()));
  if (kind == "profit_bins") {
    double width = params.profit_bin_width;
    if (!(width > 0)) {
      // default: half the smallest offer profit, so single allocations land
      // in distinct bins
      double lo = std::numeric_limits<double>::infinity();
      for (const ServiceOffer& o : offers) lo = std::min(lo, o.profit);
      width = offers.empty() ? 1.0 : std::max(lo / 2, 1e-9);
    }
    return std::make_unique<ProfitBinEncoder>(width);
  }
  throw ValidationError("unknown state encoder '" + params.state_encoder + "'");
}

AllocationEnv::AllocationEnv(std::vector<ServiceOffer> offers, const ProviderConfig& cfg)
    : offers_(std::move(offers)),
      cfg_(cfg),
      occupancy_(cfg.fleet_size, offer_event_times(offers_)) {
  for (std::size_t i = 0; i < offers_.size(); ++i) {
    const ServiceOffer& o = offers_[i];
    for (double slot : o.slots) {
      Action a;
      a.offer = static_cast<int>(i);
      a.request_id = o.request_id;
      a.arrival = slot;
      a.depart = slot - o.at;
      a.release = a.depart + o.rtt;
      a.drones = o.drones;
      a.profit = o.profit;
      actions_.push_back(a);
    }
  }
  // canonical action order: by (request id, arrival)
  std::sort(actions_.begin(), actions_.end(), [](const Action& a, const Action& b) {
    if (a.request_id != b.request_id) return a.request_id < b.request_id;
    return a.arrival < b.arrival;
  });
  actions_of_offer_.resize(offers_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i)
    actions_of_offer_[actions_[i].offer].push_back(static_cast<int>(i));
  if (offers_.size() > 0xffff) throw ValidationError("too many offers for the compact action record");
  hot_.resize(actions_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const Action& a = actions_[i];
    if (a.drones > 0xff) throw ValidationError("swarm size exceeds the compact action record");
    hot_[i].lo = occupancy_.coord_of(a.depart);
    hot_[i].hi = occupancy_.coord_of(a.release);
    hot_[i].offer = static_cast<std::uint16_t>(a.offer);
    hot_[i].drones = static_cast<std::uint8_t>(a.drones);
  }
  range_lo_.assign(offers_.size(), 0);
  range_hi_.assign(offers_.size(), 0);
  for (std::size_t o = 0; o < offers_.size(); ++o) {
    const std::vector<int>& acts = actions_of_offer_[o];
    range_lo_[o] = acts.empty() ? 0 : acts.front();
    range_hi_[o] = acts.empty() ? 0 : acts.back() + 1;
  }
  // offers in action-index order (= ascending request id)
  offer_order_.resize(offers_.size());
  for (std::size_t o = 0; o < offers_.size(); ++o) offer_order_[o] = static_cast<int>(o);
  std::sort(offer_order_.begin(), offer_order_.end(),
            [&](int a, int b) { return range_lo_[a] < range_lo_[b]; });
  offer_rank_.resize(offers_.size());
  for (std::size_t i = 0; i < offer_order_.size(); ++i) offer_rank_[offer_order_[i]] = static_cast<int>(i);
  offer_alive_.assign(offers_.size(), 0);
  offer_tree_.assign(offers_.size() + 1, 0);
  reset();
}

void AllocationEnv::reset() {
  ++occ_ver_;  // stale positive verdicts expire; never reused across episodes
  occupancy_.clear();
  state_.allocated.assign(offers_.size(), 0);
  state_.allocated_count = 0;
  state_.accumulated_profit = 0;
  entries_.clear();
  for (ActionHot& h : hot_) h.dead = 0;
  sampleable_ = static_cast<int>(actions_.size());
  int n = static_cast<int>(offers_.size());
  for (int o = 0; o < n; ++o) offer_alive_[o] = range_hi_[o] - range_lo_[o];
  // linear Fenwick build
  std::fill(offer_tree_.begin(), offer_tree_.end(), 0);
  for (int i = 1; i <= n; ++i) {
    offer_tree_[i] += offer_alive_[i - 1];
    int parent = i + (i & -i);
    if (parent <= n) offer_tree_[parent] += offer_tree_[i];
  }
}

void AllocationEnv::kill(int action) const {
  ActionHot& h = hot_[action];
  if (h.dead) return;
  h.dead = 1;
  int o = h.offer;
  // an allocated offer already gave up its whole weight at step time
  if (state_.allocated[o]) return;
  --offer_alive_[o];
  --sampleable_;
  for (int i = o + 1; i <= static_cast<int>(offers_.size()); i += i & -i) --offer_tree_[i];
}

int AllocationEnv::weighted_offer(int& k) const {
  int idx = 0;
  int n = static_cast<int>(offers_.size());
  int bit = 1;
  while (2 * bit <= n) bit *= 2;
  for (; bit; bit /= 2) {
    int next = idx + bit;
    if (next <= n && offer_tree_[next] <= k) {
      idx = next;
      k -= offer_tree_[next];
    }
  }
  return idx;  // 0-based offer index; k is the offset inside it
}

bool AllocationEnv::is_valid(int action) const {
  ActionHot& h = hot_[action];
  if (h.dead) return false;
  if (h.ver == occ_ver_) return true;
  if (state_.allocated[h.offer] || !occupancy_.fits_at(h.lo, h.hi, h.drones)) {
    kill(action);
    return false;
  }
  h.ver = occ_ver_;
  return true;
}

std::vector<int> AllocationEnv::valid_actions() const {
  std::vector<int> out;
  for (int o : offer_order_) {
    if (state_.allocated[o] || offer_alive_[o] == 0) continue;
    for (int a = range_lo_[o]; a < range_hi_[o]; ++a)
      if (!hot_[a].dead && is_valid(a)) out.push_back(a);
  }
  return out;
}

int AllocationEnv::first_valid(int from) const {
  if (actions_.empty()) return -1;
  int start = 0;
  if (from > 0) {
    if (from >= static_cast<int>(actions_.size())) return -1;
    start = offer_rank_[actions_[from].offer];
  }
  for (std::size_t i = start; i < offer_order_.size(); ++i) {
    int o = offer_order_[i];
    if (state_.allocated[o] || offer_alive_[o] == 0) continue;
    for (int a = std::max(from, range_lo_[o]); a < range_hi_[o]; ++a) {
      if (hot_[a].dead) continue;
      if (is_valid(a)) return a;
    }
  }
  return -1;
}

int AllocationEnv::sample_valid(std::mt19937_64& rng) const {
  // every rejected draw kills its action, so the loop drains toward
  // terminal instead of spinning
  while (sampleable_ > 0) {
    // modulo draw: the bias at tens-of-actions range is ~1e-17, far below
    // anything observable, and it keeps the draw to one engine call
    int k = static_cast<int>(rng() % static_cast<std::uint64_t>(sampleable_));
    int o = weighted_offer(k);
    int a = range_lo_[o];
    for (;; ++a)
      if (!hot_[a].dead && k-- == 0) break;
    ActionHot& h = hot_[a];
    if (occupancy_.fits_at(h.lo, h.hi, h.drones)) {
      h.ver = occ_ver_;
      return a;
    }
    kill(a);
  }
  return -1;
}

double AllocationEnv::step(int action) {
  if (action < 0 || action >= static_cast<int>(actions_.size()) || !is_valid(action))
    throw ValidationError("invalid action " + std::to_string(action));
  const Action& a = actions_[action];
  ++occ_ver_;
  occupancy_.add_at(hot_[action].lo, hot_[action].hi, a.drones);
  state_.allocated[a.offer] = 1;
  ++state_.allocated_count;
  state_.accumulated_profit += a.profit;
  entries_.push_back(make_entry(offers_[a.offer], a.arrival));
  // retire the offer's remaining slots in one go
  int w = offer_alive_[a.offer];
  if (w > 0) {
    sampleable_ -= w;
    for (int i = a.offer + 1; i <= static_cast<int>(offers_.size()); i += i & -i)
      offer_tree_[i] -= w;
  }
  return a.profit;
}

Schedule AllocationEnv::schedule() const {
  Schedule s;
  s.entries = entries_;
  for (const AllocEntry& e : entries_) s.total_profit += e.profit;
  return s;
}

namespace {

// strict heap order: a ranks before b (higher value, then lower action)
inline bool heap_before(std::pair<float, int> a, std::pair<float, int> b) {
  return a.first > b.first || (a.first == b.first && a.second < b.second);
}

}  // namespace

std::uint32_t QTable::find_idx(StateKey s) const {
  if (memo_idx_ != kNoRow && memo_key_ == s) return memo_idx_;
  if (table_.empty()) return kNoRow;
  std::size_t mask = table_.size() - 1;
  std::size_t i = (s * 0x9e3779b97f4a7c15ULL) >> shift_;
  for (;; i = (i + 1) & mask) {
    const Slot& sl = table_[i];
    if (sl.row == kNoRow) return kNoRow;
    if (sl.key == s) {
      memo_key_ = s;
      memo_idx_ = sl.row;
      return sl.row;
    }
  }
}

QTable::Row* QTable::find_row(StateKey s) const {
  std::uint32_t i = find_idx(s);
  return i == kNoRow ? nullptr : const_cast<Row*>(&rows_[i]);
}

void QTable::grow() {
  std::vector<Slot> old = std::move(table_);
  std::size_t cap = old.empty() ? 64 : old.size() * 2;
  table_.assign(cap, Slot{});
  shift_ = 64 - std::countr_zero(cap);
  std::size_t mask = cap - 1;
  for (const Slot& sl : old) {
    if (sl.row == kNoRow) continue;
    std::size_t i = (sl.key * 0x9e3779b97f4a7c15ULL) >> shift_;
    while (table_[i].row != kNoRow) i = (i + 1) & mask;
    table_[i] = sl;
  }
}

double QTable::get(StateKey s, int a) const {
  const Row* row = find_row(s);
  if (!row || a < 0 || a >= static_cast<int>(row->pos.size())) return 0;
  std::uint16_t i = row->pos[a];
  return i == kAbsent ? 0 : row->heap[i].first;
}

double QTable::row_max(StateKey s) const {
  const Row* row = find_row(s);
  if (!row || row->heap.empty()) return 0;
  return std::max(0.0f, row->heap[0].first);
}

void QTable::sift_up(Row& row, int i) {
  auto e = row.heap[i];
  while (i > 0) {
    int p = (i - 1) / 2;
    if (!heap_before(e, row.heap[p])) break;
    row.heap[i] = row.heap[p];
    row.pos[row.heap[i].second] = static_cast<std::uint16_t>(i);
    i = p;
  }
  row.heap[i] = e;
  row.pos[e.second] = static_cast<std::uint16_t>(i);
}

void QTable::sift_down(Row& row, int i) {
  auto e = row.heap[i];
  int n = static_cast<int>(row.heap.size());
  for (;;) {
    int c = 2 * i + 1;
    if (c >= n) break;
    if (c + 1 < n && heap_before(row.heap[c + 1], row.heap[c])) ++c;
    if (!heap_before(row.heap[c], e)) break;
    row.heap[i] = row.heap[c];
    row.pos[row.heap[i].second] = static_cast<std::uint16_t>(i);
    i = c;
  }
  row.heap[i] = e;
  row.pos[e.second] = static_cast<std::uint16_t>(i);
}

QTable::Row& QTable::touch(StateKey s, int a) {
  if (a >= static_cast<int>(kAbsent))
    throw ValidationError("action index exceeds the Q-table row width");
  std::uint32_t idx = find_idx(s);
  if (idx == kNoRow) {
    if ((rows_.size() + 1) * 10 > table_.size() * 7) grow();
    std::size_t mask = table_.size() - 1;
    std::size_t i = (s * 0x9e3779b97f4a7c15ULL) >> shift_;
    while (table_[i].row != kNoRow) i = (i + 1) & mask;
    idx = static_cast<std::uint32_t>(rows_.size());
    table_[i] = Slot{s, idx};
    rows_.emplace_back();
    memo_key_ = s;
    memo_idx_ = idx;
  }
  Row& row = rows_[idx];
  if (a >= static_cast<int>(row.pos.size())) row.pos.resize(a + 1, kAbsent);
  return row;
}

void QTable::set(StateKey s, int a, double v) {
  apply(touch(s, a), a, static_cast<float>(v));
}

void QTable::blend(StateKey s, int a, double alpha, double target) {
  Row& row = touch(s, a);
  std::uint16_t i = row.pos[a];
  double old = i == kAbsent ? 0 : row.heap[i].first;
  apply(row, a, static_cast<float>(old + alpha * (target - old)));
}

void QTable::apply(Row& row, int a, float nv) {
  std::uint16_t i = row.pos[a];
  if (i == kAbsent) {
    row.heap.emplace_back(nv, a);
    sift_up(row, static_cast<int>(row.heap.size()) - 1);
    return;
  }
  // most updates nudge a value without breaking the local heap order
  std::pair<float, int> e{nv, a};
  int n = static_cast<int>(row.heap.size());
  int c = 2 * i + 1;
  bool parent_ok = i == 0 || !heap_before(e, row.heap[(i - 1) / 2]);
  bool kids_ok = (c >= n || !heap_before(row.heap[c], e)) &&
                 (c + 1 >= n || !heap_before(row.heap[c + 1], e));
  if (parent_ok && kids_ok) {
    row.heap[i].first = nv;
    return;
  }
  row.heap[i].first = nv;
  if (!parent_ok)
    sift_up(row, i);
  else
    sift_down(row, i);
}

const QTable::Row* QTable::row(StateKey s) const {
  return find_row(s);
}

void q_update(QTable& q, StateKey s, int a, double reward, StateKey next, bool terminal,
              double alpha, double gamma) {
  double bootstrap = terminal ? 0.0 : q.row_max(next);
  q.blend(s, a, alpha, reward + gamma * bootstrap);
}

double epsilon_at(const RlParams& params, int episode) {
  double horizon = params.epsilon_decay_fraction * params.episodes;
  if (horizon <= 0 || episode >= horizon) return params.epsilon_end;
  double frac = episode / horizon;
  return params.epsilon_start + frac * (params.epsilon_end - params.epsilon_start);
}

namespace {

// Probe rank packed into one u64: value descending, then action ascending,
// so a plain integer max-scan pops the next probe. The float bits get the
// usual total-order transform (flip all bits of negatives, flip the sign of
// non-negatives) and the action index is stored complemented.
constexpr std::uint64_t probe_rank(float v, int a) {
  std::uint32_t u = std::bit_cast<std::uint32_t>(v);
  if (u == 0x80000000u) u = 0;  // -0 ranks as +0
  u ^= (u & 0x80000000u) ? 0xffffffffu : 0x80000000u;
  return (static_cast<std::uint64_t>(u) << 32) |
         static_cast<std::uint64_t>(~static_cast<std::uint32_t>(a));
}

// Every rank at or below this has value <= 0.
constexpr std::uint64_t kZeroRankCeil = probe_rank(0.0f, 0);

// Greedy action: argmax over valid actions with missing entries reading 0,
// ties to the lowest action index (= lowest request id, then arrival).
// Walks the row's heap best-first via a frontier of heap slots whose parents
// were already probed, so only dead-or-better entries are visited and the
// heap itself stays untouched. The frontier is an unsorted pool popped by
// max-scan: pushes stay O(1) and the scan is branch-predictable, which beats
// keeping it sorted at these sizes. A long run of dead probes falls back to
// one exact pass over the row; both paths kill failed probes, so dead
// entries cost O(1) on every later visit this episode.
int greedy_action(const AllocationEnv& env, const QTable& q, StateKey s) {
  const QTable::Row* row = q.row(s);
  if (row && !row->heap.empty()) {
    constexpr int probe_cap = 4;
    std::uint64_t rank[probe_cap + 2];
    int slot[probe_cap + 2];
    int fn = 0;
    rank[fn] = probe_rank(row->heap[0].first, row->heap[0].second);
    slot[fn++] = 0;
    int probes = 0;
    int n = static_cast<int>(row->heap.size());
    while (fn > 0) {
      int bi = 0;
      for (int i = 1; i < fn; ++i)
        if (rank[i] > rank[bi]) bi = i;
      if (rank[bi] <= kZeroRankCeil) {
        fn = 0;  // nothing on the frontier can beat the 0 floor
        break;
      }
      int sl = slot[bi];
      --fn;
      rank[bi] = rank[fn];
      slot[bi] = slot[fn];
      int a = row->heap[sl].second;
      if (env.is_valid(a)) return a;
      for (int c = 2 * sl + 1; c <= 2 * sl + 2 && c < n; ++c) {
        rank[fn] = probe_rank(row->heap[c].first, row->heap[c].second);
        slot[fn++] = c;
      }
      if (++probes >= probe_cap) break;
    }
    if (fn > 0) {
      // capped out: one interleaved pass probing strict improvements only
      float best = 0;
      int best_a = -1;
      for (const auto& [v, a] : row->heap) {
        if (v < best || (v == best && (best_a == -1 || a > best_a)) || v <= 0) continue;
        if (env.is_valid(a)) {
          best = v;
          best_a = a;
        }
      }
      if (best_a != -1) return best_a;
    }
    // a drained frontier proved every positive entry invalid
  }
  // no positive entry survives: lowest valid action
  return env.first_valid();
}

int choose_action(const AllocationEnv& env, const QTable& q, StateKey s, double epsilon,
                  std::mt19937_64& rng) {
  // top 53 bits -> uniform double in [0, 1); one engine call per coin
  double coin = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  if (coin < epsilon) return env.sample_valid(rng);
  return greedy_action(env, q, s);
}

}  // namespace

TrainResult train(const std::vector<ServiceOffer>& offers, const ProviderConfig& cfg,
                  const RlParams& params, std::uint64_t seed) {
  TrainResult result;
  auto encoder = make_encoder(params, offers);
  result.encoder = encoder->name();
  AllocationEnv env(offers, cfg);
  if (env.actions().empty()) return result;  // nothing to learn

  std::mt19937_64 rng(seed);
  result.returns.reserve(params.episodes);
  for (int ep = 0; ep < params.episodes; ++ep) {
    env.reset();
    double eps = epsilon_at(params, ep);
    double ep_return = 0;
    StateKey s = encoder->encode(env.state());
    int a = choose_action(env, result.q, s, eps, rng);
    while (a != -1) {
      double r = env.step(a);
      ep_return += r;
      StateKey s2 = encoder->encode(env.state());
      // the follow-up choice also reveals whether s2 is terminal
      int a2 = choose_action(env, result.q, s2, eps, rng);
      q_update(result.q, s, a, r, s2, a2 == -1, params.alpha, params.gamma);
      s = s2;
      a = a2;
    }
    result.returns.push_back(ep_return);
  }
  return result;
}

Schedule extract_schedule(const QTable& q, const std::vector<ServiceOffer>& offers,
                          const ProviderConfig& cfg, const RlParams& params) {
  auto encoder = make_encoder(params, offers);
  AllocationEnv env(offers, cfg);
  while (true) {
    int a = greedy_action(env, q, encoder->encode(env.state()));
    if (a == -1) break;
    env.step(a);
  }
  return env.schedule();
}

void write_rewards_csv(const std::string& path, const std::vector<double>& returns) {
  csv::Writer w(path);
  w.row({"episode", "return"});
  for (std::size_t i = 0; i < returns.size(); ++i)
    w.row({std::to_string(i), csv::num(returns[i])});
  w.close();
}

}  // namespace sdaas
