#include <gtest/gtest.h>

#include "support.hpp"

namespace dockalloc {
namespace {

using testing::random_instance;

std::vector<StationCostPtr> three_station_costs() { return instance_costs(three_station_instance()); }

TEST(BikeOptimal, NoBikes) {
  const auto a = bike_optimal({2, 3, 1}, 0, three_station_costs());
  EXPECT_EQ(a.bikes, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(a.open_docks, (std::vector<int>{2, 3, 1}));
}

TEST(BikeOptimal, ThreeStationBikeGoesToFirstStation) {
  const auto costs = three_station_costs();
  const auto a = bike_optimal({1, 1, 1}, 1, costs);
  EXPECT_EQ(a.bikes, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(objective(a, costs), 1.5);
}

TEST(BikeOptimal, MatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ri = random_instance(seed);
    std::mt19937_64 rng(seed);
    std::vector<int> cap;
    int room = 0;
    for (std::size_t i = 0; i < ri.costs.size(); ++i) {
      cap.push_back(static_cast<int>(rng() % 6));
      room += cap.back();
    }
    const int bikes = room == 0 ? 0 : static_cast<int>(rng() % (room + 1));
    const auto a = bike_optimal(cap, bikes, ri.costs);
    EXPECT_EQ(a.total_bikes(), bikes);
    EXPECT_EQ(a.capacities(), cap);
    EXPECT_EQ(objective(a, ri.costs), bike_optimal_exhaustive(cap, bikes, ri.costs)) << "seed " << seed;
  }
}

TEST(BikeOptimal, TooManyBikesIsInfeasible) {
  EXPECT_THROW(bike_optimal({1, 1, 0}, 3, three_station_costs()), InfeasibleError);
}

TEST(BestMove, SymmetricStationsHaveNoImprovingMove) {
  const auto p = FiniteProfile{{{seq({-1, +1}), 0.5}, {seq({+1, +1}), 0.25}}};
  std::vector<StationCostPtr> costs(3, make_finite_cost("s", p));
  Constraints c;
  c.bikes = 3;
  c.docks = 3;
  c.lower = {0, 0, 0};
  c.upper = {5, 5, 5};
  c.baseline = Allocation({1, 1, 1}, {1, 1, 1});
  const auto start = bike_optimal(c.baseline.capacities(), 3, costs);
  EXPECT_FALSE(best_move(start, 0, c, costs).has_value());
}

TEST(BestMove, ThreeStationMoveReachesOne) {
  const auto spec = three_station_instance();
  const auto costs = instance_costs(spec);
  const auto mv = best_move(spec.constraints.baseline, 0, spec.constraints, costs);
  ASSERT_TRUE(mv.has_value());
  EXPECT_DOUBLE_EQ(mv->delta, -0.5);
  const auto r = optimize(spec.constraints, costs);
  EXPECT_EQ(r.objective, 1.0);
  EXPECT_EQ(r.allocation.capacities(), (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(r.allocation.bikes, (std::vector<int>{0, 0, 1}));
}

TEST(BestMove, OppositeStationsMatchEnumeration) {
  // Moving the returns station's full dock to the rentals station saves one stockout.
  std::vector<StationCostPtr> costs{make_finite_cost("rent", FiniteProfile::deterministic(seq({-1, -1, -1}))),
                                    make_finite_cost("ret", FiniteProfile::deterministic(seq({+1})))};
  Constraints c;
  c.bikes = 3;
  c.docks = 1;
  c.lower = {0, 0};
  c.upper = {4, 4};
  c.baseline = Allocation({0, 1}, {2, 1});
  const auto heap = best_move(c.baseline, 0, c, costs);
  const auto brute = best_move_exhaustive(c.baseline, 0, c, costs);
  ASSERT_TRUE(heap && brute);
  EXPECT_EQ(heap->delta, -1.0);
  EXPECT_EQ(heap->delta, brute->delta);
  EXPECT_EQ(heap->kind, brute->kind);
}

// Heap search agrees with direct enumeration at every state of many runs.
TEST(BestMove, HeapSearchMatchesEnumerationAlongRuns) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto ri = random_instance(seed);
    const auto& c = ri.spec.constraints;
    auto eng = detail::start_engine(detail::with_depot(c, ri.costs), detail::capacities_with_depot(c),
                                    c.bikes, 1, c.threshold);
    const std::size_t n = ri.costs.size();
    for (int t = 0; t < 20; ++t) {
      Allocation cur({eng.open_docks().begin(), eng.open_docks().begin() + static_cast<long>(n)},
                     {eng.bikes().begin(), eng.bikes().begin() + static_cast<long>(n)});
      const auto brute = best_move_exhaustive(cur, eng.bikes()[n], c, ri.costs);
      const auto heap = eng.best_move();
      ASSERT_EQ(heap.has_value(), brute.has_value()) << "seed " << seed << " step " << t;
      if (!heap) break;
      ASSERT_EQ(heap->delta, brute->delta) << "seed " << seed << " step " << t;
      eng.apply(*heap);
    }
  }
}

TEST(Optimize, ZeroMovesReturnsBikeOptimalBaseline) {
  const auto spec = three_station_instance();
  auto c = spec.constraints;
  c.max_moves = 0;
  const auto costs = instance_costs(spec);
  const auto r = optimize(c, costs);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.allocation, bike_optimal(c.baseline.capacities(), c.bikes, costs));
  EXPECT_EQ(r.objective, 1.5);
}

TEST(Optimize, PrefixOptimalityOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto ri = random_instance(seed);
    const auto& c = ri.spec.constraints;
    const auto r = optimize(c, ri.costs);
    const auto bf = brute_force_optimum(c, ri.costs);
    EXPECT_EQ(r.start_objective, brute_force_value(bf, 0)) << "seed " << seed;
    for (std::size_t t = 0; t < r.log.size(); ++t) {
      EXPECT_EQ(r.log[t].objective, brute_force_value(bf, static_cast<long long>(t) + 1))
          << "seed " << seed << " z " << t + 1;
    }
    EXPECT_EQ(r.objective, bf.best_by_z.back()) << "seed " << seed;
  }
}

TEST(Optimize, RunInvariants) {
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    const auto ri = random_instance(seed);
    const auto& c = ri.spec.constraints;
    const auto r = optimize(c, ri.costs);
    EXPECT_LE(static_cast<long long>(r.log.size()), c.total_capacity());
    double prev = r.start_objective;
    double prev_delta = -std::numeric_limits<double>::infinity();
    for (const auto& e : r.log) {
      EXPECT_LT(e.objective, prev);
      EXPECT_GE(e.move.delta, prev_delta - 1e-12) << "improvements must not grow, seed " << seed;
      prev_delta = e.move.delta;
      prev = e.objective;
    }
    EXPECT_EQ(r.allocation.total_capacity(), c.total_capacity());
    EXPECT_EQ(r.allocation.total_bikes() + r.unallocated_bikes, c.bikes);
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_GE(r.allocation.capacity(i), c.lower[i]);
      EXPECT_LE(r.allocation.capacity(i), c.upper[i]);
      EXPECT_GE(r.allocation.open_docks[i], 0);
      EXPECT_GE(r.allocation.bikes[i], 0);
    }
    EXPECT_LE(dock_distance(r.allocation, c.baseline), 2 * static_cast<long long>(r.log.size()));
  }
}

TEST(Optimize, MoveBoundIsRespected) {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    auto ri = random_instance(seed);
    auto c = ri.spec.constraints;
    for (long long z = 0; z <= 3; ++z) {
      c.max_moves = z;
      const auto r = optimize(c, ri.costs);
      EXPECT_LE(static_cast<long long>(r.log.size()), z);
      EXPECT_LE(dock_distance(r.allocation, c.baseline), 2 * z);
    }
  }
}

TEST(Optimize, DepotBikesAreReportedAsUnallocated) {
  // Bikes only hurt a returns-only station, so they stay in the depot.
  std::vector<StationCostPtr> costs{make_finite_cost("ret", FiniteProfile::deterministic(seq({+1, +1})))};
  Constraints c;
  c.bikes = 2;
  c.docks = 0;
  c.lower = {0};
  c.upper = {2};
  c.baseline = Allocation({2}, {0});
  const auto r = optimize(c, costs);
  EXPECT_EQ(r.unallocated_bikes, 2);
  EXPECT_EQ(r.allocation.bikes, (std::vector<int>{0}));
}

TEST(Optimize, InfeasibleBoundsAreReported) {
  const auto spec = three_station_instance();
  auto c = spec.constraints;
  c.lower = {2, 2, 2};
  try {
    optimize(c, instance_costs(spec));
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_GE(e.reasons().size(), 2u);
  }
}

TEST(Optimize, BudgetMustMatchBaseline) {
  const auto spec = three_station_instance();
  auto c = spec.constraints;
  c.docks = 5;
  EXPECT_THROW(optimize(c, instance_costs(spec)), InfeasibleError);
}

TEST(Optimize, MalformedInputIsAValidationError) {
  const auto spec = three_station_instance();
  auto c = spec.constraints;
  c.upper.pop_back();
  EXPECT_THROW(optimize(c, instance_costs(spec)), ValidationError);
}

TEST(OptimizeTradeoff, ExpensiveDocksReduceToPlainMoves) {
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    auto ri = random_instance(seed);
    auto c = ri.spec.constraints;
    c.tradeoff = Tradeoff{5, 3};
    const auto t = optimize_tradeoff(c, ri.costs);
    EXPECT_EQ(t.purchased, 0);
    auto plain = c;
    plain.tradeoff.reset();
    plain.max_moves = 3;
    EXPECT_EQ(t.result.objective, optimize(plain, ri.costs).objective);
  }
}

TEST(OptimizeTradeoff, ZeroBudgetKeepsBaseline) {
  auto ri = random_instance(7);
  auto c = ri.spec.constraints;
  c.tradeoff = Tradeoff{1, 0};
  const auto t = optimize_tradeoff(c, ri.costs);
  EXPECT_EQ(t.result.allocation, bike_optimal(c.baseline.capacities(), c.bikes, ri.costs));
}

TEST(OptimizeTradeoff, MatchesJointEnumeration) {
  for (std::uint64_t seed = 400; seed < 460; ++seed) {
    auto ri = random_instance(seed);
    auto c = ri.spec.constraints;
    c.tradeoff = Tradeoff{1 + static_cast<int>(seed % 3), static_cast<int>(seed % 5)};
    const auto t = optimize_tradeoff(c, ri.costs);
    const auto bf = brute_force_tradeoff(c, ri.costs);
    EXPECT_EQ(t.result.objective, bf.objective) << "seed " << seed;
    const long long extra = t.result.allocation.total_capacity() - c.total_capacity();
    EXPECT_GE(extra, 0);
    EXPECT_LE(extra, t.purchased);
    EXPECT_LE(dock_distance(t.result.allocation, c.baseline), 2 * t.moves + t.purchased) << "seed " << seed;
    EXPECT_EQ(objective(t.result.allocation, ri.costs), t.result.objective);
  }
}

}  // namespace
}  // namespace dockalloc
