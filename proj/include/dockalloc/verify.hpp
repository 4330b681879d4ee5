#ifndef DOCKALLOC_VERIFY_HPP_
#define DOCKALLOC_VERIFY_HPP_

// Randomised oracle suite: every check compares a solver or cost routine with an
// independent computation and counts disagreements.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "allocator.hpp"
#include "longrun.hpp"
#include "oracle.hpp"
#include "posterior.hpp"
#include "scaling.hpp"
#include "udf.hpp"

namespace dockalloc::verify {

// ---------------------------------------------------------------------------
// Random inputs

inline ArrivalSequence random_sequence(std::mt19937_64& rng, int len) {
  std::bernoulli_distribution coin(0.5);
  ArrivalSequence s;
  for (int k = 0; k < len; ++k) s.push_back(coin(rng) ? Customer::Return : Customer::Rental);
  return s;
}

/// Probabilities are multiples of 1/16, so expected costs are dyadic rationals and
/// short sums of them are exact in double precision.
inline FiniteProfile random_finite_profile(std::mt19937_64& rng, int max_atoms = 3, int max_len = 5) {
  std::uniform_int_distribution<int> atoms(1, max_atoms);
  std::uniform_int_distribution<int> len(0, max_len);
  FiniteProfile p;
  int left = 16;
  const int na = atoms(rng);
  for (int a = 0; a < na && left > 0; ++a) {
    const int units = a + 1 == na ? std::uniform_int_distribution<int>(1, left)(rng)
                                  : std::uniform_int_distribution<int>(1, left)(rng) / 2 + 1;
    const int u = std::min(units, left);
    left -= u;
    p.atoms.push_back({random_sequence(rng, len(rng)), u / 16.0});
  }
  return p;
}

/// Rates per minute drawn uniformly from [0, max_rate).
inline PoissonProfile random_poisson_profile(std::mt19937_64& rng, int intervals, double minutes,
                                             double max_rate) {
  std::uniform_real_distribution<double> rate(0.0, max_rate);
  PoissonProfile p;
  p.station_id = "p";
  p.horizon = Horizon{intervals, minutes, 0};
  for (int m = 0; m < intervals; ++m) {
    p.rental_rate.push_back(rate(rng));
    p.return_rate.push_back(rate(rng));
  }
  return p;
}

struct RandomInstance {
  InstanceSpec spec;
  std::vector<StationCostPtr> costs;
};

/// n in [2, 4], D + B in [n, 10], finite profiles, random box bounds containing the
/// baseline capacities.
inline RandomInstance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nd(2, 4);
  const int n = nd(rng);
  RandomInstance ri;
  auto& s = ri.spec;
  s.name = "random-" + std::to_string(seed);
  const int total = std::uniform_int_distribution<int>(n, 10)(rng);
  std::vector<int> cap(n, 0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < total; ++k) ++cap[pick(rng)];
  const int bikes = std::uniform_int_distribution<int>(0, total)(rng);
  std::vector<int> b(n, 0);
  int placed = std::uniform_int_distribution<int>(0, bikes)(rng);
  for (int guard = 0; placed > 0 && guard < 1000; ++guard) {
    const int i = pick(rng);
    if (b[i] < cap[i]) {
      ++b[i];
      --placed;
    }
  }
  auto& c = s.constraints;
  c.bikes = bikes;
  c.docks = total - bikes;
  std::vector<int> d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = cap[i] - b[i];
    c.lower.push_back(std::uniform_int_distribution<int>(0, cap[i])(rng) / 2);
    c.upper.push_back(cap[i] + std::uniform_int_distribution<int>(0, 5)(rng));
    s.ids.push_back("s" + std::to_string(i));
    s.profiles.push_back(random_finite_profile(rng));
  }
  c.baseline = Allocation(d, b);
  s.max_z = total;
  ri.costs = instance_costs(s);
  return ri;
}

// ---------------------------------------------------------------------------
// Checks

struct CheckResult {
  std::string name;
  long long cases = 0;
  long long violations = 0;
  std::vector<std::string> details;  // first few violations

  [[nodiscard]] bool passed() const noexcept { return violations == 0 && cases > 0; }

  void fail(const std::string& what) {
    ++violations;
    if (details.size() < 10) details.push_back(what);
  }
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int instances = 200;
  int finite_tables = 100;
  int poisson_tables = 20;
  int simulation_cases = 50;
  long long trials = kDefaultTrials;
  int identity_tuples = 10000;
};

inline CheckResult check_three_station() {
  CheckResult r{"three_station_values", 0, 0, {}};
  const auto spec = three_station_instance();
  const auto costs = instance_costs(spec);
  struct Want {
    int station, d, b;
    double value;
  };
  for (const Want& w : {Want{0, 0, 1, 0.5}, Want{0, 1, 0, 0.5}, Want{1, 1, 0, 0.0}, Want{1, 0, 0, 0.5},
                        Want{2, 1, 0, 1.0}, Want{2, 1, 1, 0.0}}) {
    ++r.cases;
    const double got = (*costs[w.station])(w.d, w.b);
    if (std::abs(got - w.value) > 1e-12) {
      r.fail(spec.ids[w.station] + "(" + std::to_string(w.d) + "," + std::to_string(w.b) + ")");
    }
  }
  const auto opt = optimize(spec.constraints, costs);
  ++r.cases;
  if (std::abs(opt.start_objective - 1.5) > 1e-12) r.fail("start objective");
  ++r.cases;
  if (std::abs(opt.objective - 1.0) > 1e-12) r.fail("optimized objective");
  return r;
}

/// Greedy z-move prefixes against the enumerated optimum for every z.
inline CheckResult check_prefix_optimality(const SuiteOptions& o) {
  CheckResult r{"prefix_optimality", 0, 0, {}};
  for (int k = 0; k < o.instances; ++k) {
    const auto ri = random_instance(o.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    const auto& c = ri.spec.constraints;
    const auto run = optimize(c, ri.costs);
    const auto bf = brute_force_optimum(c, ri.costs);
    const auto zmax = static_cast<long long>(bf.best_by_z.size()) - 1;
    for (long long z = 0; z <= std::max<long long>(zmax, static_cast<long long>(run.log.size())); ++z) {
      ++r.cases;
      const double prefix = z == 0 ? run.start_objective
                            : z <= static_cast<long long>(run.log.size())
                                ? run.log[static_cast<std::size_t>(z - 1)].objective
                                : run.objective;
      if (prefix != brute_force_value(bf, z)) r.fail(ri.spec.name + " z=" + std::to_string(z));
    }
  }
  return r;
}

inline CheckResult check_multimodularity(const SuiteOptions& o) {
  CheckResult r{"multimodularity", 0, 0, {}};
  std::mt19937_64 rng(o.seed * 7919ULL + 3);
  for (int k = 0; k < o.finite_tables; ++k) {
    const auto p = random_finite_profile(rng, 4, 8);
    const int cap = std::uniform_int_distribution<int>(2, 20)(rng);
    ++r.cases;
    if (!check_multimodular(finite_cost_table("f" + std::to_string(k), p, cap)).empty()) {
      r.fail("finite table " + std::to_string(k));
    }
  }
  for (int k = 0; k < o.poisson_tables; ++k) {
    const int intervals = std::uniform_int_distribution<int>(1, 8)(rng);
    const auto p = random_poisson_profile(rng, intervals, 30.0, 0.3);
    const int cap = std::uniform_int_distribution<int>(2, 20)(rng);
    ++r.cases;
    if (!check_multimodular(daily_cost_poisson(p, cap)).empty()) r.fail("poisson table " + std::to_string(k));
  }
  return r;
}

/// Uniformization against direct simulation, within three standard errors.
inline CheckResult check_simulation(const SuiteOptions& o) {
  CheckResult r{"poisson_vs_simulation", 0, 0, {}};
  std::mt19937_64 rng(o.seed * 104729ULL + 5);
  for (int k = 0; k < o.simulation_cases; ++k) {
    const int intervals = std::uniform_int_distribution<int>(1, 6)(rng);
    const auto p = random_poisson_profile(rng, intervals, 30.0, 0.25);
    const int cap = std::uniform_int_distribution<int>(0, 10)(rng);
    const int b = std::uniform_int_distribution<int>(0, cap)(rng);
    const double exact = daily_cost_poisson(p, cap).at(cap - b, b);
    const auto sim = simulate_cost(p, cap - b, b, o.trials, o.seed + static_cast<std::uint64_t>(k));
    ++r.cases;
    if (std::abs(exact - sim.mean) > 3.0 * sim.std_error + 1e-12) {
      std::ostringstream s;
      s << "case " << k << ": exact " << exact << " simulated " << sim.mean << " +- " << sim.std_error;
      r.fail(s.str());
    }
  }
  return r;
}

/// Greedy, scaling and hybrid reach the same objective, and no scaling phase takes
/// more than 5n moves, n counting the depot.
inline CheckResult check_solver_equivalence(const SuiteOptions& o) {
  CheckResult r{"solver_equivalence", 0, 0, {}};
  for (int k = 0; k < o.instances; ++k) {
    const auto ri = random_instance(o.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    const auto& c = ri.spec.constraints;
    const double greedy = optimize(c, ri.costs).objective;
    const long long n = static_cast<long long>(c.size()) + 1;
    for (Solver s : {Solver::Scaling, Solver::Hybrid}) {
      const auto run = optimize_scaled(c, ri.costs, make_plan(s, c.total_capacity()));
      ++r.cases;
      if (run.result.objective != greedy) r.fail(ri.spec.name + " " + solver_name(s) + " objective");
      for (const auto& ph : run.phases) {
        if (s == Solver::Scaling && ph.dock_moves > 5 * n) {
          r.fail(ri.spec.name + " phase step " + std::to_string(ph.step) + " took " +
                 std::to_string(ph.dock_moves) + " moves");
        }
      }
    }
  }
  return r;
}

/// Long-run cost: a function of capacity only, rentals-only stations lose every
/// rental, and the table is multimodular when the day chain is ergodic.
inline CheckResult check_longrun(const SuiteOptions& o) {
  CheckResult r{"longrun", 0, 0, {}};
  std::mt19937_64 rng(o.seed * 15485863ULL + 7);
  for (int k = 1; k <= 4; ++k) {
    const DemandProfile p = FiniteProfile::deterministic(ArrivalSequence(static_cast<std::size_t>(k), Customer::Rental));
    for (int cap = 0; cap <= 10; ++cap) {
      ++r.cases;
      if (std::abs(longrun_cost(p, cap, 0) - k) > 1e-12) r.fail("rentals-only k=" + std::to_string(k));
    }
  }
  int tables = 0;
  int draws = 0;
  while (tables < 20 && draws < 1000) {
    ++draws;
    const DemandProfile p = random_finite_profile(rng, 3, 6);
    for (int cap = 0; cap <= 6; ++cap) {
      const double ref = longrun_cost(p, cap, 0);
      for (int b = 1; b <= cap; ++b) {
        ++r.cases;
        if (longrun_cost(p, cap - b, b) != ref) r.fail("split dependence at capacity " + std::to_string(cap));
      }
    }
    bool ergodic = true;
    for (int cap = 0; cap <= 8 && ergodic; ++cap) ergodic = day_chain(p, cap).ergodic;
    if (!ergodic) continue;
    ++tables;
    ++r.cases;
    const auto cost = make_longrun_cost("f", std::get<FiniteProfile>(p));
    if (!check_multimodular(cost->table(8)).empty()) r.fail("finite long-run table " + std::to_string(draws));
  }
  for (int k = 0; k < 5; ++k) {
    auto p = random_poisson_profile(rng, 6, 30.0, 0.3);
    const auto cost = make_longrun_cost(std::make_shared<const PoissonStationModel>(p));
    ++r.cases;
    if (!check_multimodular(cost->table(12)).empty()) r.fail("poisson long-run table " + std::to_string(k));
  }
  return r;
}

/// Stockouts of the smaller station on the surviving customers equal its extra
/// stockouts on the full stream.
inline CheckResult check_censoring_identity(const SuiteOptions& o) {
  CheckResult r{"censoring_identity", 0, 0, {}};
  std::mt19937_64 rng(o.seed * 32452843ULL + 11);
  std::uniform_int_distribution<int> small(0, 6);
  for (int k = 0; k < o.identity_tuples; ++k) {
    const auto x = random_sequence(rng, std::uniform_int_distribution<int>(0, 16)(rng));
    const int d = small(rng);
    const int b = small(rng);
    const int d2 = std::uniform_int_distribution<int>(0, d)(rng);
    const int b2 = std::uniform_int_distribution<int>(0, b)(rng);
    ++r.cases;
    const long long lhs = count_stockouts(censored_subsequence(x, d, b), d2, b2).stockouts;
    const long long rhs = count_stockouts(x, d2, b2).stockouts - count_stockouts(x, d, b).stockouts;
    if (lhs != rhs) r.fail("tuple " + std::to_string(k));
  }
  return r;
}

/// The one-move, four-station instance: both endpoints are feasible, the ceiling
/// midpoint is not, the floor midpoint is.
inline CheckResult check_midpoint_fixture() {
  CheckResult r{"midpoint_fixture", 0, 0, {}};
  const auto c = midpoint_instance().constraints;
  const std::vector<int> x{1, 0, 0, 1};
  const std::vector<int> y{0, 1, 1, 0};
  const auto [up, down] = discrete_midpoints(prefix_sums(x), prefix_sums(y));
  auto expect = [&](bool cond, const std::string& what) {
    ++r.cases;
    if (!cond) r.fail(what);
  };
  expect(within_moves(x, c), "x feasible");
  expect(within_moves(y, c), "y feasible");
  expect(from_prefix_sums(up) == std::vector<int>{1, 0, 1, 0}, "ceiling midpoint value");
  expect(from_prefix_sums(down) == std::vector<int>{0, 1, 0, 1}, "floor midpoint value");
  expect(!within_moves(from_prefix_sums(up), c), "ceiling midpoint infeasible");
  expect(within_moves(from_prefix_sums(down), c), "floor midpoint feasible");
  return r;
}

/// The simulation check is opt-in; it is slow at full trial counts.
inline std::vector<CheckResult> run_suite(const SuiteOptions& o, bool with_simulation) {
  std::vector<CheckResult> out;
  out.push_back(check_three_station());
  out.push_back(check_prefix_optimality(o));
  out.push_back(check_multimodularity(o));
  if (with_simulation) out.push_back(check_simulation(o));
  out.push_back(check_solver_equivalence(o));
  out.push_back(check_longrun(o));
  out.push_back(check_censoring_identity(o));
  out.push_back(check_midpoint_fixture());
  return out;
}

}  // namespace dockalloc::verify

#endif  // DOCKALLOC_VERIFY_HPP_
