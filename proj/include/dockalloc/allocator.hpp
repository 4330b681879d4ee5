#ifndef DOCKALLOC_ALLOCATOR_HPP_
#define DOCKALLOC_ALLOCATOR_HPP_

// Discrete gradient descent over dock-moves. Internally every instance gains a
// zero-cost depot with fixed capacity B so that the bike budget is an equality.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cost_oracle.hpp"
#include "error.hpp"
#include "lazy_heap.hpp"

namespace dockalloc {

inline constexpr double kImprovementThreshold = 1e-11;

struct Allocation {
  std::vector<int> open_docks;
  std::vector<int> bikes;

  Allocation() = default;
  Allocation(std::vector<int> d, std::vector<int> b) : open_docks(std::move(d)), bikes(std::move(b)) {
    if (open_docks.size() != bikes.size()) throw ValidationError("allocation: length mismatch");
  }

  [[nodiscard]] std::size_t size() const noexcept { return open_docks.size(); }
  [[nodiscard]] int capacity(std::size_t i) const { return open_docks[i] + bikes[i]; }
  [[nodiscard]] std::vector<int> capacities() const {
    std::vector<int> c(size());
    for (std::size_t i = 0; i < size(); ++i) c[i] = capacity(i);
    return c;
  }
  [[nodiscard]] long long total_capacity() const {
    long long s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += capacity(i);
    return s;
  }
  [[nodiscard]] long long total_bikes() const {
    return std::accumulate(bikes.begin(), bikes.end(), 0LL);
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Dock-move distance: sum of absolute capacity changes.
inline long long dock_distance(const std::vector<int>& a, const std::vector<int>& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

inline long long dock_distance(const Allocation& a, const Allocation& b) {
  return dock_distance(a.capacities(), b.capacities());
}

struct Tradeoff {
  int unit_cost = 1;      // k: moves forgone per purchased dock
  int joint_budget = 0;   // M
};

struct Constraints {
  int bikes = 0;  // B
  int docks = 0;  // D, empty docks; total capacity is D + B
  std::optional<long long> max_moves;  // z; unset means unbounded
  std::vector<int> lower;
  std::vector<int> upper;
  Allocation baseline;
  std::optional<Tradeoff> tradeoff;
  double threshold = kImprovementThreshold;

  [[nodiscard]] std::size_t size() const noexcept { return lower.size(); }
  [[nodiscard]] long long total_capacity() const { return static_cast<long long>(docks) + bikes; }
};

/// Throws ValidationError for malformed input and InfeasibleError listing every
/// violated feasibility condition.
inline void check_constraints(const Constraints& c, const std::vector<StationCostPtr>& costs) {
  const std::size_t n = c.lower.size();
  if (c.upper.size() != n || c.baseline.size() != n || costs.size() != n) {
    throw ValidationError("constraints: lower, upper, baseline and costs must have equal length");
  }
  if (c.bikes < 0 || c.docks < 0) throw ValidationError("constraints: budgets must be non-negative");
  if (c.max_moves && *c.max_moves < 0) throw ValidationError("constraints: move bound must be non-negative");
  if (c.tradeoff && (c.tradeoff->unit_cost < 1 || c.tradeoff->joint_budget < 0)) {
    throw ValidationError("constraints: tradeoff needs k >= 1 and M >= 0");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!costs[i]) throw ValidationError("constraints: missing cost oracle for station " + std::to_string(i));
    if (c.baseline.open_docks[i] < 0 || c.baseline.bikes[i] < 0) {
      throw ValidationError("constraints: negative baseline at station " + std::to_string(i));
    }
    if (c.lower[i] < 0) throw ValidationError("constraints: negative lower bound at station " + std::to_string(i));
  }
  std::vector<std::string> reasons;
  long long sum_l = 0;
  long long sum_u = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string tag = "station " + std::to_string(i) + " ('" + costs[i]->id() + "')";
    if (c.lower[i] > c.upper[i]) reasons.push_back(tag + ": lower bound exceeds upper bound");
    const int cap = c.baseline.capacity(i);
    if (cap < c.lower[i] || cap > c.upper[i]) {
      reasons.push_back(tag + ": baseline capacity " + std::to_string(cap) + " outside [" +
                        std::to_string(c.lower[i]) + ", " + std::to_string(c.upper[i]) + "]");
    }
    sum_l += c.lower[i];
    sum_u += c.upper[i];
  }
  const long long total = c.total_capacity();
  if (sum_l > total) {
    reasons.push_back("sum of lower bounds " + std::to_string(sum_l) + " exceeds D+B = " +
                      std::to_string(total));
  }
  if (sum_u < total) {
    reasons.push_back("sum of upper bounds " + std::to_string(sum_u) + " is below D+B = " +
                      std::to_string(total));
  }
  if (c.baseline.total_capacity() != total) {
    reasons.push_back("baseline holds " + std::to_string(c.baseline.total_capacity()) +
                      " docks but D+B = " + std::to_string(total) +
                      " (new docks enter through the tradeoff option)");
  }
  if (c.baseline.total_bikes() > c.bikes) {
    reasons.push_back("baseline holds " + std::to_string(c.baseline.total_bikes()) +
                      " bikes but B = " + std::to_string(c.bikes));
  }
  if (!reasons.empty()) throw InfeasibleError(std::move(reasons));
}

enum class MoveKind : std::uint8_t { OpenDock = 0, FullDock = 1, FullFromBike = 2, OpenToBike = 3 };

/// Short names o, e, E, O.
inline const char* move_kind_name(MoveKind k) noexcept {
  switch (k) {
    case MoveKind::OpenDock: return "o";
    case MoveKind::FullDock: return "e";
    case MoveKind::FullFromBike: return "E";
    case MoveKind::OpenToBike: return "O";
  }
  return "?";
}

/// o_ij: empty dock i -> j.  e_ij: full dock i -> j.
/// E_ijh: empty dock leaves i, full dock appears at j, h gives up a bike (h: d+1, b-1).
/// O_ijh: full dock leaves i, empty dock appears at j, h gains a bike (h: d-1, b+1).
struct DockMove {
  MoveKind kind = MoveKind::OpenDock;
  int i = -1;
  int j = -1;
  int h = -1;  // -1 for o and e
  int step = 1;
  double delta = 0.0;
};

struct BikeTransfer {
  int from = -1;
  int to = -1;
  int step = 1;
  double delta = 0.0;
};

struct MoveLogEntry {
  int iteration = 0;
  DockMove move;
  double objective = 0.0;
};

using MoveLog = std::vector<MoveLogEntry>;

namespace detail {

struct EngineStation {
  StationCostPtr cost;
  int lower = 0;
  int upper = 0;
};

enum Marginal : int {
  kAddEmpty = 0,
  kRemoveEmpty,
  kAddFull,
  kRemoveFull,
  kAddBike,
  kRemoveBike,
  kMarginalCount
};

inline std::tuple<double, int, int, int, int> move_key(const DockMove& m) {
  return {m.delta, static_cast<int>(m.kind), m.i, m.j, m.h};
}

/// Fills bikes one at a time into the station with the smallest marginal cost.
/// Per-station convexity in the bike count makes this optimal.
inline std::vector<int> greedy_bikes(const std::vector<EngineStation>& st,
                                     const std::vector<int>& capacity, long long bikes) {
  const std::size_t n = st.size();
  long long room = 0;
  for (int c : capacity) room += c;
  if (bikes > room) {
    throw InfeasibleError({"bike budget " + std::to_string(bikes) + " exceeds total capacity " +
                           std::to_string(room)});
  }
  std::vector<int> b(n, 0);
  std::vector<std::uint64_t> version(n, 0);
  LazyHeap heap;
  auto push = [&](std::size_t i) {
    ++version[i];
    if (b[i] >= capacity[i]) return;
    const auto& row = *st[i].cost->row(capacity[i]);
    heap.push(row[b[i] + 1] - row[b[i]], static_cast<int>(i), version[i]);
  };
  for (std::size_t i = 0; i < n; ++i) push(i);
  for (long long k = 0; k < bikes; ++k) {
    const auto top = heap.top(1, version);
    const auto i = static_cast<std::size_t>(top.front().station);
    ++b[i];
    push(i);
  }
  return b;
}

/// Incremental best-move search. Six lazy heaps hold, per station, the cost change of
/// each elementary one-station change at the current stride.
class DescentEngine {
 public:
  DescentEngine(std::vector<EngineStation> stations, std::vector<int> open_docks,
                std::vector<int> bikes, int step, double threshold)
      : st_(std::move(stations)), d_(std::move(open_docks)), b_(std::move(bikes)),
        step_(step), threshold_(threshold) {
    const std::size_t n = st_.size();
    if (d_.size() != n || b_.size() != n) throw ValidationError("engine: size mismatch");
    if (step_ < 1) throw ValidationError("engine: step must be positive");
    for (auto& s : st_) s.upper = std::min(s.upper, s.cost->max_capacity());
    version_.assign(n, 0);
    cur_.assign(n, 0.0);
    rebuild();
  }

  [[nodiscard]] std::size_t size() const noexcept { return st_.size(); }
  [[nodiscard]] int step() const noexcept { return step_; }
  [[nodiscard]] const std::vector<int>& open_docks() const noexcept { return d_; }
  [[nodiscard]] const std::vector<int>& bikes() const noexcept { return b_; }
  [[nodiscard]] int capacity(std::size_t i) const { return d_[i] + b_[i]; }
  [[nodiscard]] double station_cost(std::size_t i) const { return cur_[i]; }
  [[nodiscard]] const EngineStation& station(std::size_t i) const { return st_[i]; }

  /// Sum of station costs in index order.
  [[nodiscard]] double objective() const {
    double s = 0.0;
    for (double v : cur_) s += v;
    return s;
  }

  void set_step(int step) {
    if (step < 1) throw ValidationError("engine: step must be positive");
    step_ = step;
    rebuild();
  }

  /// Most improving dock-move, or none when no move lowers the objective by more
  /// than the threshold. Ties resolve to the lowest (kind, i, j, h).
  [[nodiscard]] std::optional<DockMove> best_move() {
    std::array<std::vector<LazyHeap::Entry>, kMarginalCount> top;
    for (int m = 0; m < kMarginalCount; ++m) top[m] = heaps_[m].top(3, version_);
    std::optional<DockMove> best;
    auto consider = [&](MoveKind kind, int i, int j, int h, double delta) {
      DockMove mv{kind, i, j, h, step_, delta};
      if (!best || move_key(mv) < move_key(*best)) best = mv;
    };
    for (const auto& ri : top[kRemoveEmpty]) {
      for (const auto& aj : top[kAddEmpty]) {
        if (ri.station != aj.station) {
          consider(MoveKind::OpenDock, ri.station, aj.station, -1, ri.value + aj.value);
        }
      }
    }
    for (const auto& ri : top[kRemoveFull]) {
      for (const auto& aj : top[kAddFull]) {
        if (ri.station != aj.station) {
          consider(MoveKind::FullDock, ri.station, aj.station, -1, ri.value + aj.value);
        }
      }
    }
    for (const auto& ri : top[kRemoveEmpty]) {
      for (const auto& aj : top[kAddFull]) {
        if (ri.station == aj.station) continue;
        for (const auto& rh : top[kRemoveBike]) {
          if (rh.station == ri.station || rh.station == aj.station) continue;
          consider(MoveKind::FullFromBike, ri.station, aj.station, rh.station,
                   ri.value + aj.value + rh.value);
        }
      }
    }
    for (const auto& ri : top[kRemoveFull]) {
      for (const auto& aj : top[kAddEmpty]) {
        if (ri.station == aj.station) continue;
        for (const auto& ah : top[kAddBike]) {
          if (ah.station == ri.station || ah.station == aj.station) continue;
          consider(MoveKind::OpenToBike, ri.station, aj.station, ah.station,
                   ri.value + aj.value + ah.value);
        }
      }
    }
    if (best && best->delta < -threshold_) return best;
    return std::nullopt;
  }

  /// Most improving transfer of `step` bikes between two stations.
  [[nodiscard]] std::optional<BikeTransfer> best_bike_transfer() {
    const auto give = heaps_[kRemoveBike].top(2, version_);
    const auto take = heaps_[kAddBike].top(2, version_);
    std::optional<BikeTransfer> best;
    for (const auto& g : give) {
      for (const auto& t : take) {
        if (g.station == t.station) continue;
        BikeTransfer bt{g.station, t.station, step_, g.value + t.value};
        if (!best || std::tie(bt.delta, bt.from, bt.to) < std::tie(best->delta, best->from, best->to)) {
          best = bt;
        }
      }
    }
    if (best && best->delta < -threshold_) return best;
    return std::nullopt;
  }

  /// Applies a move at its own stride; returns the exact objective change.
  double apply(const DockMove& m) {
    const int s = m.step;
    const double before = local_cost(m);
    switch (m.kind) {
      case MoveKind::OpenDock:
        change(m.i, -s, 0);
        change(m.j, s, 0);
        break;
      case MoveKind::FullDock:
        change(m.i, 0, -s);
        change(m.j, 0, s);
        break;
      case MoveKind::FullFromBike:
        change(m.i, -s, 0);
        change(m.j, 0, s);
        change(m.h, s, -s);
        break;
      case MoveKind::OpenToBike:
        change(m.i, 0, -s);
        change(m.j, s, 0);
        change(m.h, -s, s);
        break;
    }
    return local_cost(m) - before;
  }

  double apply(const BikeTransfer& t) {
    const double before = cur_[t.from] + cur_[t.to];
    change(t.from, t.step, -t.step);
    change(t.to, -t.step, t.step);
    return cur_[t.from] + cur_[t.to] - before;
  }

  /// Whether the one-station change (dd, db) keeps station i inside its bounds.
  [[nodiscard]] bool admissible(int i, int dd, int db) const {
    const int nd = d_[i] + dd;
    const int nb = b_[i] + db;
    const int cap = nd + nb;
    return nd >= 0 && nb >= 0 && cap >= st_[i].lower && cap <= st_[i].upper;
  }

 private:
  [[nodiscard]] double cost(int i, int d, int b) const { return (*st_[i].cost)(d, b); }

  [[nodiscard]] double local_cost(const DockMove& m) const {
    double s = cur_[m.i] + cur_[m.j];
    if (m.h >= 0) s += cur_[m.h];
    return s;
  }

  void change(int i, int dd, int db) {
    if (!admissible(i, dd, db)) {
      throw ValidationError("engine: move leaves station " + std::to_string(i) + " out of bounds");
    }
    d_[i] += dd;
    b_[i] += db;
    refresh(i);
  }

  [[nodiscard]] std::optional<double> marginal(int i, Marginal m) const {
    const int s = step_;
    int dd = 0;
    int db = 0;
    switch (m) {
      case kAddEmpty: dd = s; break;
      case kRemoveEmpty: dd = -s; break;
      case kAddFull: db = s; break;
      case kRemoveFull: db = -s; break;
      case kAddBike: dd = -s; db = s; break;
      case kRemoveBike: dd = s; db = -s; break;
      default: return std::nullopt;
    }
    if (!admissible(i, dd, db)) return std::nullopt;
    return cost(i, d_[i] + dd, b_[i] + db) - cur_[i];
  }

  void refresh(int i) {
    ++version_[i];
    cur_[i] = cost(i, d_[i], b_[i]);
    for (int m = 0; m < kMarginalCount; ++m) {
      if (auto v = marginal(i, static_cast<Marginal>(m))) heaps_[m].push(*v, i, version_[i]);
    }
  }

  void rebuild() {
    for (auto& h : heaps_) h.clear();
    for (std::size_t i = 0; i < st_.size(); ++i) refresh(static_cast<int>(i));
  }

  std::vector<EngineStation> st_;
  std::vector<int> d_;
  std::vector<int> b_;
  int step_;
  double threshold_;
  std::vector<std::uint64_t> version_;
  std::vector<double> cur_;
  std::array<LazyHeap, kMarginalCount> heaps_;
};

/// Real stations followed by the depot (index n).
inline std::vector<EngineStation> with_depot(const Constraints& c,
                                             const std::vector<StationCostPtr>& costs) {
  std::vector<EngineStation> st;
  st.reserve(costs.size() + 2);
  for (std::size_t i = 0; i < costs.size(); ++i) st.push_back({costs[i], c.lower[i], c.upper[i]});
  st.push_back({make_zero_cost("__depot__"), c.bikes, c.bikes});
  return st;
}

/// Engine started at the bike-optimal allocation for the given capacities.
inline DescentEngine start_engine(std::vector<EngineStation> st, const std::vector<int>& capacity,
                                  long long bikes, int step, double threshold) {
  auto b = greedy_bikes(st, capacity, bikes);
  std::vector<int> d(capacity.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = capacity[i] - b[i];
  return DescentEngine(std::move(st), std::move(d), std::move(b), step, threshold);
}

}  // namespace detail

struct OptimizeResult {
  Allocation allocation;       // real stations only
  int unallocated_bikes = 0;   // bikes left in the depot
  double objective = 0.0;
  double start_objective = 0.0;  // bike-optimal baseline
  std::vector<double> station_costs;
  MoveLog log;                 // indices >= n refer to internal stations (depot = n)
};

/// Bike-optimal placement of B bikes into fixed capacities.
inline Allocation bike_optimal(const std::vector<int>& capacity, int bikes,
                               const std::vector<StationCostPtr>& costs) {
  if (capacity.size() != costs.size()) throw ValidationError("bike_optimal: size mismatch");
  if (bikes < 0) throw ValidationError("bike_optimal: negative bike budget");
  std::vector<detail::EngineStation> st;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (capacity[i] < 0) throw ValidationError("bike_optimal: negative capacity");
    st.push_back({costs[i], 0, capacity[i]});
  }
  auto b = detail::greedy_bikes(st, capacity, bikes);
  std::vector<int> d(capacity.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = capacity[i] - b[i];
  return {std::move(d), std::move(b)};
}

inline double objective(const Allocation& a, const std::vector<StationCostPtr>& costs) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (*costs[i])(a.open_docks[i], a.bikes[i]);
  return s;
}

namespace detail {

inline OptimizeResult collect(const DescentEngine& eng, std::size_t n, double start, MoveLog log) {
  OptimizeResult r;
  r.allocation.open_docks.assign(eng.open_docks().begin(), eng.open_docks().begin() + n);
  r.allocation.bikes.assign(eng.bikes().begin(), eng.bikes().begin() + n);
  for (std::size_t i = n; i < eng.size(); ++i) r.unallocated_bikes += eng.bikes()[i];
  r.objective = eng.objective();
  r.start_objective = start;
  for (std::size_t i = 0; i < n; ++i) r.station_costs.push_back(eng.station_cost(i));
  r.log = std::move(log);
  return r;
}

/// Runs best moves until none improves or `limit` moves are made.
inline MoveLog descend(DescentEngine& eng, long long limit, int first_iteration = 1) {
  MoveLog log;
  for (long long t = 0; t < limit; ++t) {
    auto mv = eng.best_move();
    if (!mv) break;
    eng.apply(*mv);
    log.push_back({first_iteration + static_cast<int>(t), *mv, eng.objective()});
  }
  return log;
}

inline std::vector<int> capacities_with_depot(const Constraints& c) {
  auto cap = c.baseline.capacities();
  cap.push_back(c.bikes);
  return cap;
}

}  // namespace detail

/// Best improving dock-move from `current`, which should be bike-optimal.
/// `current` may include bikes at the depot via `depot_bikes`.
inline std::optional<DockMove> best_move(const Allocation& current, int depot_bikes,
                                         const Constraints& c,
                                         const std::vector<StationCostPtr>& costs) {
  auto st = detail::with_depot(c, costs);
  auto d = current.open_docks;
  auto b = current.bikes;
  d.push_back(c.bikes - depot_bikes);
  b.push_back(depot_bikes);
  detail::DescentEngine eng(std::move(st), std::move(d), std::move(b), 1, c.threshold);
  return eng.best_move();
}

/// Greedy descent from the bike-optimal baseline. The k-th log entry holds the
/// optimum over allocations within dock-move distance 2k of the baseline.
inline OptimizeResult optimize(const Constraints& c, const std::vector<StationCostPtr>& costs) {
  check_constraints(c, costs);
  auto eng = detail::start_engine(detail::with_depot(c, costs), detail::capacities_with_depot(c),
                                  c.bikes, 1, c.threshold);
  const double start = eng.objective();
  const long long limit = c.max_moves.value_or(std::numeric_limits<long long>::max());
  auto log = detail::descend(eng, limit);
  return detail::collect(eng, costs.size(), start, std::move(log));
}

struct TradeoffCandidate {
  int purchased = 0;  // D-bar
  long long moves = 0;  // z = M - k D-bar
  double objective = 0.0;
};

struct TradeoffResult {
  OptimizeResult result;
  int purchased = 0;   // chosen D-bar
  int placed = 0;      // new docks actually installed
  long long moves = 0; // chosen z
  std::vector<TradeoffCandidate> candidates;
};

namespace detail {

/// Solves one D-bar: real stations, depot (n) and a dock inventory (n + 1) that
/// starts with D-bar empty docks and counts toward the move distance.
inline TradeoffCandidate solve_purchase(const Constraints& c, const std::vector<StationCostPtr>& costs,
                                        int purchased, long long moves, OptimizeResult& out) {
  const std::size_t n = costs.size();
  auto st = with_depot(c, costs);
  st.push_back({make_zero_cost("__inventory__"), 0, purchased});
  auto cap = capacities_with_depot(c);
  cap.push_back(purchased);
  auto eng = start_engine(std::move(st), cap, c.bikes, 1, c.threshold);
  const double start = eng.objective();
  auto log = descend(eng, moves + purchased);

  // The enlarged ball also admits allocations with dist > 2z + D-bar that leave
  // docks in the inventory. Put such docks back at stations that lost docks; each
  // step lowers dist by one and extra capacity never hurts.
  const auto base = c.baseline.capacities();
  std::vector<int> real(n);
  for (std::size_t i = 0; i < n; ++i) real[i] = eng.capacity(i);
  int inventory = eng.capacity(n + 1);
  while (inventory > 0 && dock_distance(real, base) > 2 * moves + purchased) {
    std::size_t k = 0;
    while (real[k] >= base[k]) ++k;
    ++real[k];
    --inventory;
  }
  std::vector<EngineStation> plain = with_depot(c, costs);
  std::vector<int> plain_cap(real);
  plain_cap.push_back(c.bikes);
  for (std::size_t i = 0; i < n; ++i) plain[i].upper = std::max(plain[i].upper, plain_cap[i]);
  auto fin = start_engine(std::move(plain), plain_cap, c.bikes, 1, c.threshold);
  out = collect(fin, n, start, std::move(log));
  return {purchased, moves, out.objective};
}

}  // namespace detail

/// Joint budget over moved and purchased docks: z + k * D-bar <= M. Each D-bar is
/// solved independently; the cheapest D-bar wins ties.
inline TradeoffResult optimize_tradeoff(const Constraints& c, const std::vector<StationCostPtr>& costs) {
  if (!c.tradeoff) throw ValidationError("optimize_tradeoff: no tradeoff given");
  check_constraints(c, costs);
  const int k = c.tradeoff->unit_cost;
  const int budget = c.tradeoff->joint_budget;
  TradeoffResult best;
  bool have = false;
  for (int purchased = 0; purchased <= budget / k; ++purchased) {
    const long long moves = budget - static_cast<long long>(k) * purchased;
    OptimizeResult r;
    const auto cand = detail::solve_purchase(c, costs, purchased, moves, r);
    best.candidates.push_back(cand);
    if (!have || cand.objective < best.result.objective - c.threshold) {
      have = true;
      best.result = std::move(r);
      best.purchased = purchased;
      best.moves = moves;
    }
  }
  best.placed = static_cast<int>(best.result.allocation.total_capacity() - c.baseline.total_capacity());
  return best;
}

}  // namespace dockalloc

#endif  // DOCKALLOC_ALLOCATOR_HPP_
