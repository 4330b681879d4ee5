#include <gtest/gtest.h>

#include "support.hpp"

namespace dockalloc {
namespace {

TEST(CountStockouts, ReturnToZeroCapacityStationFails) {
  const auto r = count_stockouts(seq({+1}), 0, 0);
  EXPECT_EQ(r.stockouts, 1);
}

TEST(CountStockouts, ThirdStationServedWithDockAndBike) {
  EXPECT_EQ(count_stockouts(seq({+1, -1, -1}), 1, 1).stockouts, 0);
}

TEST(CountStockouts, ThirdStationWithoutBikeMissesOneRental) {
  const auto r = count_stockouts(seq({+1, -1, -1}), 1, 0);
  EXPECT_EQ(r.stockouts, 1);
  EXPECT_EQ(r.final_state.bikes, 0);
  EXPECT_EQ(r.final_state.open_docks, 1);
}

TEST(CountStockouts, EmptySequenceIsFree) {
  EXPECT_EQ(count_stockouts({}, 0, 0).stockouts, 0);
}

TEST(CountStockouts, RejectsNegativeState) {
  EXPECT_THROW(count_stockouts(seq({+1}), -1, 0), ValidationError);
}

TEST(CountStockouts, ConservesCapacityAlongTrajectory) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const auto x = testing::random_sequence(rng, 20);
    const int d = static_cast<int>(rng() % 6);
    const int b = static_cast<int>(rng() % 6);
    SequenceState s{d, b, 0};
    int prev = 0;
    for (Customer c : x) {
      step(s, c);
      ASSERT_EQ(s.open_docks + s.bikes, d + b);
      ASSERT_GE(s.stockouts, prev);
      prev = s.stockouts;
    }
  }
}

TEST(CountStockouts, MoreDocksOrBikesNeverHurt) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto x = testing::random_sequence(rng, 15);
    const int d = static_cast<int>(rng() % 6);
    const int b = static_cast<int>(rng() % 6);
    const int d2 = static_cast<int>(rng() % (d + 1));
    const int b2 = static_cast<int>(rng() % (b + 1));
    ASSERT_GE(count_stockouts(x, d2, b2).stockouts, count_stockouts(x, d, b).stockouts);
  }
}

TEST(CountStockoutsMasked, ExemptFailuresAreNotCounted) {
  const auto x = seq({+1, +1, +1});
  const bool none[] = {false, false, false};
  const bool all[] = {true, true, true};
  EXPECT_EQ(count_stockouts_masked(x, none, 2, 0).stockouts, 1);
  EXPECT_EQ(count_stockouts_masked(x, all, 2, 0).stockouts, 0);
}

TEST(CountStockoutsMasked, RejectsMaskOfWrongLength) {
  const bool mask[] = {false};
  EXPECT_THROW(count_stockouts_masked(seq({+1, -1}), mask, 1, 1), ValidationError);
}

TEST(CustomerFromSign, RejectsOtherValues) {
  EXPECT_EQ(customer_from_sign(1), Customer::Return);
  EXPECT_EQ(customer_from_sign(-1), Customer::Rental);
  EXPECT_THROW(customer_from_sign(0), ValidationError);
}

}  // namespace
}  // namespace dockalloc
