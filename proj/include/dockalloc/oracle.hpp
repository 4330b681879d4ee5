#ifndef DOCKALLOC_ORACLE_HPP_
#define DOCKALLOC_ORACLE_HPP_

// Independent checks: exhaustive enumeration, direct event simulation and the two
// small counterexample instances.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "allocator.hpp"
#include "cost_oracle.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "rng.hpp"
#include "sequence.hpp"
#include "udf.hpp"

namespace dockalloc {

inline constexpr double kSearchGuard = 1e7;

struct InstanceSpec {
  std::string name;
  std::vector<std::string> ids;
  std::vector<DemandProfile> profiles;
  Constraints constraints;
  long long max_z = 0;  // oracle checks z = 0..max_z
};

inline std::vector<StationCostPtr> instance_costs(const InstanceSpec& spec) {
  std::vector<StationCostPtr> out;
  for (std::size_t i = 0; i < spec.profiles.size(); ++i) {
    const auto& p = spec.profiles[i];
    if (const auto* f = std::get_if<FiniteProfile>(&p)) {
      out.push_back(make_finite_cost(spec.ids[i], *f));
    } else {
      auto pp = std::get<PoissonProfile>(p);
      pp.station_id = spec.ids[i];
      out.push_back(make_poisson_cost(std::make_shared<const PoissonStationModel>(pp)));
    }
  }
  return out;
}

struct BruteForceOptions {
  double guard = kSearchGuard;
  /// Restricts to the lattice origin + stride * Z^(2n+2) (depot included), where the
  /// origin carries the depot's bikes in `origin_depot_bikes`.
  int stride = 1;
  std::optional<Allocation> origin;
  int origin_depot_bikes = 0;
};

struct BruteForceResult {
  std::vector<double> best_by_z;       // index z; non-increasing
  std::vector<Allocation> argmin_by_z;
  long long enumerated = 0;
};

namespace detail {

struct Enumerator {
  using Visit = std::function<void(const std::vector<int>&, const std::vector<int>&, double,
                                   long long, long long)>;

  Enumerator(const Constraints& c_, const std::vector<StationCostPtr>& costs_,
             const BruteForceOptions& opt_, long long lo_sum, long long hi_sum, Visit v)
      : c(c_), costs(costs_), opt(opt_), cap_lo(lo_sum), cap_hi(hi_sum), visit(std::move(v)) {
    prepare();
  }

  const Constraints& c;
  const std::vector<StationCostPtr>& costs;
  const BruteForceOptions& opt;
  long long cap_lo;
  long long cap_hi;
  Visit visit;

  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<long long> suffix_lo;
  std::vector<long long> suffix_hi;
  std::vector<int> cap;
  std::vector<int> bikes;
  std::vector<int> base;
  long long enumerated = 0;

  void prepare() {
    const std::size_t n = costs.size();
    lo.resize(n);
    hi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = c.lower[i];
      hi[i] = std::min(c.upper[i], costs[i]->max_capacity());
    }
    suffix_lo.assign(n + 1, 0);
    suffix_hi.assign(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
      suffix_lo[i] = suffix_lo[i + 1] + lo[i];
      suffix_hi[i] = suffix_hi[i + 1] + hi[i];
    }
    cap.assign(n, 0);
    bikes.assign(n, 0);
    base = c.baseline.capacities();
  }

  [[nodiscard]] bool on_lattice_cap(std::size_t i, int v) const {
    return opt.stride == 1 || (v - base[i]) % opt.stride == 0;
  }
  [[nodiscard]] bool on_lattice_bikes(std::size_t i, int v) const {
    return opt.stride == 1 || (v - opt.origin->bikes[i]) % opt.stride == 0;
  }

  void run(std::size_t i, long long capsum, long long bikesum, double obj, long long dist) {
    const std::size_t n = costs.size();
    if (i == n) {
      if (capsum < cap_lo || capsum > cap_hi) return;
      if (opt.stride > 1 && (c.bikes - bikesum - opt.origin_depot_bikes) % opt.stride != 0) return;
      ++enumerated;
      visit(cap, bikes, obj, capsum, dist);
      return;
    }
    for (int v = lo[i]; v <= hi[i]; ++v) {
      const long long s = capsum + v;
      if (s + suffix_lo[i + 1] > cap_hi) break;
      if (s + suffix_hi[i + 1] < cap_lo) continue;
      if (!on_lattice_cap(i, v)) continue;
      cap[i] = v;
      const auto row = costs[i]->row(v);
      for (int b = 0; b <= v && bikesum + b <= c.bikes; ++b) {
        if (!on_lattice_bikes(i, b)) continue;
        bikes[i] = b;
        run(i + 1, s, bikesum + b, obj + (*row)[b], dist + std::abs(v - base[i]));
      }
    }
    cap[i] = 0;
    bikes[i] = 0;
  }
};

/// Number of (capacity, bikes) vectors with capacity sum in [cap_lo, cap_hi] and
/// bike sum at most B, ignoring lattice restrictions.
inline double search_space(const Constraints& c, const std::vector<StationCostPtr>& costs,
                           long long cap_lo, long long cap_hi) {
  const auto cap_max = static_cast<std::size_t>(std::max(0LL, cap_hi));
  const auto bike_max = static_cast<std::size_t>(std::max(0, c.bikes));
  std::vector<std::vector<double>> dp(cap_max + 1, std::vector<double>(bike_max + 1, 0.0));
  dp[0][0] = 1.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    std::vector<std::vector<double>> next(cap_max + 1, std::vector<double>(bike_max + 1, 0.0));
    const int hi = std::min(c.upper[i], costs[i]->max_capacity());
    for (std::size_t s = 0; s <= cap_max; ++s) {
      for (std::size_t b = 0; b <= bike_max; ++b) {
        if (dp[s][b] == 0.0) continue;
        for (int v = c.lower[i]; v <= hi && s + v <= cap_max; ++v) {
          for (int k = 0; k <= v && b + k <= bike_max; ++k) next[s + v][b + k] += dp[s][b];
        }
      }
    }
    dp = std::move(next);
  }
  double total = 0.0;
  for (auto s = static_cast<std::size_t>(std::max(0LL, cap_lo)); s <= cap_max; ++s) {
    for (double v : dp[s]) total += v;
  }
  return total;
}

inline void guard_search(double size, double guard) {
  if (size > guard) {
    throw ValidationError("brute force refused: " + std::to_string(static_cast<long long>(size)) +
                          " allocations exceed the guard of " +
                          std::to_string(static_cast<long long>(guard)));
  }
}

}  // namespace detail

/// Exact optimum over allocations within dock-move distance 2z of the baseline, for
/// every z from 0 up to the largest distance that occurs.
inline BruteForceResult brute_force_optimum(const Constraints& c,
                                            const std::vector<StationCostPtr>& costs,
                                            const BruteForceOptions& opt = {}) {
  check_constraints(c, costs);
  if (opt.stride > 1 && !opt.origin) throw ValidationError("brute force: stride needs an origin");
  const long long total = c.total_capacity();
  detail::guard_search(detail::search_space(c, costs, total, total), opt.guard);
  std::vector<double> raw;
  std::vector<Allocation> arg;
  auto visit = [&](const std::vector<int>& cap, const std::vector<int>& b, double obj, long long,
                   long long dist) {
    const auto z = static_cast<std::size_t>((dist + 1) / 2);
    if (raw.size() <= z) {
      raw.resize(z + 1, std::numeric_limits<double>::infinity());
      arg.resize(z + 1);
    }
    if (obj < raw[z]) {
      raw[z] = obj;
      std::vector<int> d(cap.size());
      for (std::size_t i = 0; i < cap.size(); ++i) d[i] = cap[i] - b[i];
      arg[z] = Allocation(std::move(d), b);
    }
  };
  detail::Enumerator e(c, costs, opt, total, total, visit);
  e.run(0, 0, 0, 0.0, 0);
  BruteForceResult out;
  out.enumerated = e.enumerated;
  for (std::size_t z = 0; z < raw.size(); ++z) {
    if (z == 0 || raw[z] < out.best_by_z.back()) {
      out.best_by_z.push_back(raw[z]);
      out.argmin_by_z.push_back(arg[z]);
    } else {
      out.best_by_z.push_back(out.best_by_z.back());
      out.argmin_by_z.push_back(out.argmin_by_z.back());
    }
  }
  return out;
}

/// Optimum under a finite move bound, read off the per-z table.
inline double brute_force_value(const BruteForceResult& r, long long z) {
  if (r.best_by_z.empty()) return std::numeric_limits<double>::infinity();
  const auto idx = static_cast<std::size_t>(std::min<long long>(z, static_cast<long long>(r.best_by_z.size()) - 1));
  return r.best_by_z[idx];
}

struct TradeoffOptimum {
  double objective = std::numeric_limits<double>::infinity();
  Allocation allocation;
  int placed = 0;
};

/// Exhaustive optimum of the joint move/purchase problem. With e docks added,
/// the best purchase is D-bar = e, which needs dist <= 2M - (2k - 1) e.
inline TradeoffOptimum brute_force_tradeoff(const Constraints& c,
                                            const std::vector<StationCostPtr>& costs,
                                            double guard = kSearchGuard) {
  if (!c.tradeoff) throw ValidationError("brute_force_tradeoff: no tradeoff given");
  check_constraints(c, costs);
  const long long k = c.tradeoff->unit_cost;
  const long long m = c.tradeoff->joint_budget;
  const long long total = c.total_capacity();
  detail::guard_search(detail::search_space(c, costs, total, total + m / k), guard);
  TradeoffOptimum best;
  BruteForceOptions opt;
  auto visit = [&](const std::vector<int>& cap, const std::vector<int>& b, double obj,
                   long long capsum, long long dist) {
    const long long extra = capsum - total;
    if (dist > 2 * m - (2 * k - 1) * extra) return;
    if (obj < best.objective) {
      best.objective = obj;
      std::vector<int> d(cap.size());
      for (std::size_t i = 0; i < cap.size(); ++i) d[i] = cap[i] - b[i];
      best.allocation = Allocation(std::move(d), b);
      best.placed = static_cast<int>(extra);
    }
  };
  detail::Enumerator e(c, costs, opt, total, total + m / k, visit);
  e.run(0, 0, 0, 0.0, 0);
  return best;
}

/// Best dock-move by direct enumeration of every (kind, i, j, h), with the depot
/// appended as station n. Deltas are recomputed from scratch.
inline std::optional<DockMove> best_move_exhaustive(const Allocation& current, int depot_bikes,
                                                    const Constraints& c,
                                                    const std::vector<StationCostPtr>& costs,
                                                    int step = 1) {
  auto st = detail::with_depot(c, costs);
  auto d = current.open_docks;
  auto b = current.bikes;
  d.push_back(c.bikes - depot_bikes);
  b.push_back(depot_bikes);
  const int n = static_cast<int>(st.size());
  for (auto& s : st) s.upper = std::min(s.upper, s.cost->max_capacity());
  auto ok = [&](int i, int nd, int nb) {
    return nd >= 0 && nb >= 0 && nd + nb >= st[i].lower && nd + nb <= st[i].upper;
  };
  auto cost = [&](int i, int nd, int nb) { return (*st[i].cost)(nd, nb); };
  std::optional<DockMove> best;
  auto consider = [&](DockMove mv) {
    if (!best || detail::move_key(mv) < detail::move_key(*best)) best = mv;
  };
  const int s = step;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double base_ij = cost(i, d[i], b[i]) + cost(j, d[j], b[j]);
      if (ok(i, d[i] - s, b[i]) && ok(j, d[j] + s, b[j])) {
        consider({MoveKind::OpenDock, i, j, -1, s,
                  cost(i, d[i] - s, b[i]) + cost(j, d[j] + s, b[j]) - base_ij});
      }
      if (ok(i, d[i], b[i] - s) && ok(j, d[j], b[j] + s)) {
        consider({MoveKind::FullDock, i, j, -1, s,
                  cost(i, d[i], b[i] - s) + cost(j, d[j], b[j] + s) - base_ij});
      }
      for (int h = 0; h < n; ++h) {
        if (h == i || h == j) continue;
        const double base_h = cost(h, d[h], b[h]);
        if (ok(i, d[i] - s, b[i]) && ok(j, d[j], b[j] + s) && ok(h, d[h] + s, b[h] - s)) {
          consider({MoveKind::FullFromBike, i, j, h, s,
                    cost(i, d[i] - s, b[i]) + cost(j, d[j], b[j] + s) + cost(h, d[h] + s, b[h] - s) -
                        base_ij - base_h});
        }
        if (ok(i, d[i], b[i] - s) && ok(j, d[j] + s, b[j]) && ok(h, d[h] - s, b[h] + s)) {
          consider({MoveKind::OpenToBike, i, j, h, s,
                    cost(i, d[i], b[i] - s) + cost(j, d[j] + s, b[j]) + cost(h, d[h] - s, b[h] + s) -
                        base_ij - base_h});
        }
      }
    }
  }
  if (best && best->delta < -c.threshold) return best;
  return std::nullopt;
}

/// Bike-optimal placement by enumerating every bike vector.
inline double bike_optimal_exhaustive(const std::vector<int>& capacity, int bikes,
                                      const std::vector<StationCostPtr>& costs) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> b(capacity.size(), 0);
  std::function<void(std::size_t, int, double)> rec = [&](std::size_t i, int left, double obj) {
    if (i == capacity.size()) {
      if (left == 0) best = std::min(best, obj);
      return;
    }
    for (int k = 0; k <= std::min(capacity[i], left); ++k) {
      rec(i + 1, left - k, obj + (*costs[i])(capacity[i] - k, k));
    }
  };
  rec(0, bikes, 0.0);
  return best;
}

struct SimulationResult {
  double mean = 0.0;
  double std_error = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
};

inline constexpr long long kDefaultTrials = 100000;

namespace detail {

/// Runs one interval of merged Poisson arrivals on the state: arrivals at total rate
/// mu + lambda, each a return with probability lambda / (mu + lambda).
inline void simulate_interval_into(SequenceState& s, double mu, double lambda, double duration,
                                   CounterRng& rng) {
  const double total = mu + lambda;
  if (!(total > 0.0)) return;
  const double p_return = lambda / total;
  for (double t = rng.exponential(total); t < duration; t += rng.exponential(total)) {
    step(s, rng.uniform() < p_return ? Customer::Return : Customer::Rental);
  }
}

template <class TrialFn>
SimulationResult run_trials(long long trials, std::uint64_t seed, TrialFn trial) {
  if (trials < 1) throw ValidationError("simulation: trials must be positive");
  constexpr long long kChunk = 2048;
  const auto chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  std::vector<double> sum(chunks, 0.0);
  std::vector<double> sumsq(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t ch) {
    const long long lo = static_cast<long long>(ch) * kChunk;
    const long long hi = std::min(trials, lo + kChunk);
    for (long long t = lo; t < hi; ++t) {
      CounterRng rng(seed, static_cast<std::uint64_t>(t));
      const double v = trial(rng);
      sum[ch] += v;
      sumsq[ch] += v * v;
    }
  });
  double s = 0.0;
  double ss = 0.0;
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    s += sum[ch];
    ss += sumsq[ch];
  }
  const auto nt = static_cast<double>(trials);
  SimulationResult r;
  r.mean = s / nt;
  const double var = trials > 1 ? std::max(0.0, (ss - nt * r.mean * r.mean) / (nt - 1.0)) : 0.0;
  r.std_error = std::sqrt(var / nt);
  r.trials = trials;
  r.seed = seed;
  return r;
}

}  // namespace detail

/// Expected daily stockouts by direct simulation of the profile's arrivals.
inline SimulationResult simulate_cost(const PoissonProfile& profile, int open_docks, int bikes,
                                      long long trials = kDefaultTrials, std::uint64_t seed = 1) {
  profile.validate();
  if (open_docks < 0 || bikes < 0) throw ValidationError("simulate_cost: negative docks or bikes");
  const auto& h = profile.horizon;
  return detail::run_trials(trials, seed, [&](CounterRng& rng) {
    SequenceState s{open_docks, bikes, 0};
    for (int m = 0; m < h.intervals; ++m) {
      detail::simulate_interval_into(s, profile.rental_rate[m], profile.return_rate[m],
                                     h.minutes_per_interval, rng);
    }
    return static_cast<double>(s.stockouts);
  });
}

/// Stockouts in one interval from `start_bikes` bikes at capacity C.
inline SimulationResult simulate_interval(double rental_rate, double return_rate, double duration,
                                          int capacity, int start_bikes,
                                          long long trials = kDefaultTrials, std::uint64_t seed = 1) {
  detail::check_rates(rental_rate, return_rate, duration, capacity);
  if (start_bikes < 0 || start_bikes > capacity) {
    throw ValidationError("simulate_interval: start outside 0..C");
  }
  return detail::run_trials(trials, seed, [&](CounterRng& rng) {
    SequenceState s{capacity - start_bikes, start_bikes, 0};
    detail::simulate_interval_into(s, rental_rate, return_rate, duration, rng);
    return static_cast<double>(s.stockouts);
  });
}

// ---------------------------------------------------------------------------
// Counterexample fixtures.

inline ArrivalSequence seq(std::initializer_list<int> signs) {
  ArrivalSequence out;
  for (int v : signs) out.push_back(customer_from_sign(v));
  return out;
}

/// Three stations where single-unit exchanges from the bike-optimal start cannot
/// reach the optimum 1 although the start scores 3/2.
inline InstanceSpec three_station_instance() {
  InstanceSpec s;
  s.name = "three-station-exchange";
  s.ids = {"i", "j", "k"};
  s.profiles = {FiniteProfile{{{seq({-1}), 0.5}, {seq({+1, -1}), 0.5}}},
                FiniteProfile{{{seq({+1}), 0.5}}},
                FiniteProfile::deterministic(seq({+1, -1, -1}))};
  auto& c = s.constraints;
  c.bikes = 1;
  c.docks = 2;
  c.lower = {0, 0, 0};
  c.upper = {3, 3, 3};
  c.baseline = Allocation({0, 1, 1}, {1, 0, 0});
  s.max_z = 3;
  return s;
}

/// Four stations, one dock each at stations 1 and 3, no bikes, one dock move.
inline InstanceSpec midpoint_instance() {
  InstanceSpec s;
  s.name = "four-station-midpoint";
  s.ids = {"s0", "s1", "s2", "s3"};
  s.profiles.assign(4, FiniteProfile{});
  auto& c = s.constraints;
  c.bikes = 0;
  c.docks = 2;
  c.lower = {0, 0, 0, 0};
  c.upper = {2, 2, 2, 2};
  c.baseline = Allocation({0, 1, 0, 1}, {0, 0, 0, 0});
  c.max_moves = 1;
  s.max_z = 1;
  return s;
}

inline std::vector<InstanceSpec> counterexample_fixtures() {
  return {three_station_instance(), midpoint_instance()};
}

/// All x - e_p + e_q over the 2n coordinates (d_0, b_0, d_1, b_1, ...), p != q,
/// that stay non-negative and satisfy the bike budget and box bounds.
inline std::vector<Allocation> single_exchange_neighbors(const Allocation& a, const Constraints& c) {
  const std::size_t n = a.size();
  std::vector<int> x(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x[2 * i] = a.open_docks[i];
    x[2 * i + 1] = a.bikes[i];
  }
  std::vector<Allocation> out;
  for (std::size_t p = 0; p < 2 * n; ++p) {
    for (std::size_t q = 0; q < 2 * n; ++q) {
      if (p == q || x[p] == 0) continue;
      auto y = x;
      --y[p];
      ++y[q];
      Allocation cand{std::vector<int>(n), std::vector<int>(n)};
      bool feasible = true;
      for (std::size_t i = 0; i < n; ++i) {
        cand.open_docks[i] = y[2 * i];
        cand.bikes[i] = y[2 * i + 1];
        const int cap = cand.capacity(i);
        feasible = feasible && cap >= c.lower[i] && cap <= c.upper[i];
      }
      if (feasible && cand.total_bikes() <= c.bikes) out.push_back(std::move(cand));
    }
  }
  return out;
}

/// Prefix sums g(x)_k = x_0 + ... + x_k.
inline std::vector<int> prefix_sums(const std::vector<int>& x) {
  std::vector<int> g(x.size());
  int s = 0;
  for (std::size_t k = 0; k < x.size(); ++k) g[k] = s += x[k];
  return g;
}

inline std::vector<int> from_prefix_sums(const std::vector<int>& g) {
  std::vector<int> x(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) x[k] = g[k] - (k ? g[k - 1] : 0);
  return x;
}

/// Component-wise ceil and floor of (g + h) / 2 for non-negative vectors.
inline std::pair<std::vector<int>, std::vector<int>> discrete_midpoints(const std::vector<int>& g,
                                                                        const std::vector<int>& h) {
  std::vector<int> up(g.size());
  std::vector<int> down(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    up[k] = (g[k] + h[k] + 1) / 2;
    down[k] = (g[k] + h[k]) / 2;
  }
  return {up, down};
}

/// Capacity vector reachable from the baseline with at most z dock moves.
inline bool within_moves(const std::vector<int>& capacity, const Constraints& c) {
  const auto base = c.baseline.capacities();
  long long total = 0;
  for (std::size_t i = 0; i < capacity.size(); ++i) {
    if (capacity[i] < c.lower[i] || capacity[i] > c.upper[i]) return false;
    total += capacity[i];
  }
  if (total != c.total_capacity()) return false;
  return !c.max_moves || dock_distance(capacity, base) <= 2 * *c.max_moves;
}

}  // namespace dockalloc

#endif  // DOCKALLOC_ORACLE_HPP_
