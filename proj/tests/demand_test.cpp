#include <gtest/gtest.h>

#include "support.hpp"

namespace dockalloc {
namespace {

const Horizon kTwoHalfHours{2, 30.0, 6};

std::vector<TripRecord> trips_at(const std::string& id, double t, int rentals, int returns) {
  std::vector<TripRecord> out;
  for (int k = 0; k < rentals; ++k) out.push_back({id, t, Customer::Rental});
  for (int k = 0; k < returns; ++k) out.push_back({id, t, Customer::Return});
  return out;
}

TEST(HorizonBucket, MapsTimeOfDay) {
  EXPECT_EQ(horizon_bucket(kTwoHalfHours, 6 * 3600.0), 0);
  EXPECT_EQ(horizon_bucket(kTwoHalfHours, 6 * 3600.0 + 1799.0), 0);
  EXPECT_EQ(horizon_bucket(kTwoHalfHours, 6 * 3600.0 + 1800.0), 1);
  EXPECT_EQ(horizon_bucket(kTwoHalfHours, 7 * 3600.0), -1);
  EXPECT_EQ(horizon_bucket(kTwoHalfHours, 5 * 3600.0), -1);
  EXPECT_EQ(horizon_bucket(Horizon{}, 86399.0), 47);
}

TEST(EstimateRates, CountsOverServiceableMinutes) {
  const auto trips = trips_at("a", 6 * 3600.0 + 60.0, 10, 0);
  const std::vector<StatusRecord> status{{"a", 0, 20.0, 30.0}, {"a", 1, 30.0, 30.0}};
  const auto r = estimate_rates(trips, status, 1, kTwoHalfHours);
  ASSERT_EQ(r.stations.size(), 1u);
  EXPECT_EQ(r.stations[0].profile.rental_rate[0], 0.5);
  EXPECT_EQ(r.stations[0].profile.return_rate[0], 0.0);
  EXPECT_EQ(r.stations[0].profile.rental_rate[1], 0.0);
  EXPECT_TRUE(r.stations[0].flags.empty());
}

TEST(EstimateRates, NoServiceableMinutesFallsBackAndFlags) {
  const auto trips = trips_at("a", 6 * 3600.0, 5, 0);
  const std::vector<StatusRecord> status{{"a", 0, 0.0, 30.0}};
  const auto r = estimate_rates(trips, status, 1, kTwoHalfHours);
  EXPECT_EQ(r.stations[0].profile.rental_rate[0], 5.0);
  EXPECT_EQ(r.stations[0].flags, (std::vector<std::string>{"censored_fallback:rental:0"}));
}

TEST(EstimateRates, TripsOutsideTheHorizonAreCounted) {
  auto trips = trips_at("a", 6 * 3600.0, 1, 0);
  const auto late = trips_at("a", 20 * 3600.0, 2, 1);
  trips.insert(trips.end(), late.begin(), late.end());
  const auto r = estimate_rates(trips, {{"a", 0, 30.0, 30.0}}, 1, kTwoHalfHours);
  EXPECT_EQ(r.trips_outside_horizon, 3);
}

TEST(EstimateRates, StationsSortedAndLinearInCounts) {
  std::mt19937_64 rng(51);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<TripRecord> trips;
    std::vector<StatusRecord> status;
    for (const char* id : {"z", "b", "m"}) {
      for (int k = 0; k < 4; ++k) {
        const double t = 6 * 3600.0 + std::uniform_real_distribution<double>(0.0, 3599.0)(rng);
        trips.push_back({id, t, k % 2 ? Customer::Return : Customer::Rental});
      }
      for (int m = 0; m < 2; ++m) {
        status.push_back({id, m, std::uniform_real_distribution<double>(1.0, 30.0)(rng),
                          std::uniform_real_distribution<double>(1.0, 30.0)(rng)});
      }
    }
    const auto once = estimate_rates(trips, status, 1, kTwoHalfHours);
    auto doubled_trips = trips;
    doubled_trips.insert(doubled_trips.end(), trips.begin(), trips.end());
    const auto twice = estimate_rates(doubled_trips, status, 1, kTwoHalfHours);
    auto doubled_status = status;
    doubled_status.insert(doubled_status.end(), status.begin(), status.end());
    const auto spread = estimate_rates(trips, doubled_status, 2, kTwoHalfHours);
    ASSERT_EQ(once.stations.size(), 3u);
    EXPECT_EQ(once.stations[0].profile.station_id, "b");
    EXPECT_EQ(once.stations[2].profile.station_id, "z");
    for (std::size_t s = 0; s < 3; ++s) {
      for (int m = 0; m < 2; ++m) {
        EXPECT_DOUBLE_EQ(twice.stations[s].profile.rental_rate[m], 2 * once.stations[s].profile.rental_rate[m]);
        EXPECT_DOUBLE_EQ(spread.stations[s].profile.return_rate[m], once.stations[s].profile.return_rate[m] / 2);
      }
    }
  }
}

TEST(EstimateRates, ValidationErrors) {
  const auto trips = trips_at("a", 6 * 3600.0, 1, 0);
  EXPECT_THROW(estimate_rates(trips, {}, 1, kTwoHalfHours), ValidationError);
  EXPECT_THROW(estimate_rates(trips, {{"a", 5, 1.0, 1.0}}, 1, kTwoHalfHours), ValidationError);
  EXPECT_THROW(estimate_rates(trips, {{"a", 0, 31.0, 1.0}}, 1, kTwoHalfHours), ValidationError);
  EXPECT_THROW(estimate_rates(trips, {{"a", 0, 30.0, 1.0}, {"a", 0, 30.0, 1.0}}, 1, kTwoHalfHours),
               ValidationError);
  EXPECT_THROW(estimate_rates(trips, {{"a", 0, 1.0, 1.0}}, 0, kTwoHalfHours), ValidationError);
  EXPECT_THROW(estimate_rates(trips_at("a", 90000.0, 1, 0), {{"a", 0, 1.0, 1.0}}, 1, kTwoHalfHours),
               ValidationError);
  EXPECT_THROW(estimate_rates(trips, {{"a", 0, 1.0, 1.0}}, 1, Horizon{0, 30.0, 0}), ValidationError);
}

}  // namespace
}  // namespace dockalloc
