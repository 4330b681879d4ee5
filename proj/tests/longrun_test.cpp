#include <gtest/gtest.h>

#include "support.hpp"

namespace dockalloc {
namespace {

TEST(DayTransition, ZeroDemandIsIdentity) {
  EXPECT_TRUE(day_transition(FiniteProfile{}, 4).isApprox(Eigen::MatrixXd::Identity(5, 5)));
  PoissonProfile p{"z", Horizon{3, 30.0, 0}, {0, 0, 0}, {0, 0, 0}};
  EXPECT_TRUE(day_transition(DemandProfile{p}, 4).isApprox(Eigen::MatrixXd::Identity(5, 5)));
}

TEST(DayTransition, CertainRentalEmptiesUnitStation) {
  const auto rho = day_transition(FiniteProfile::deterministic(seq({-1})), 1);
  Eigen::MatrixXd want(2, 2);
  want << 1, 0, 1, 0;
  EXPECT_EQ(rho, want);
}

TEST(DayTransition, RentalThenReturn) {
  const auto rho = day_transition(FiniteProfile::deterministic(seq({-1, +1})), 2);
  Eigen::MatrixXd want(3, 3);
  want << 0, 1, 0, 0, 1, 0, 0, 0, 1;
  EXPECT_EQ(rho, want);
}

TEST(DayTransition, ResidualMassStaysPut) {
  const auto rho = day_transition(FiniteProfile{{{seq({-1}), 0.25}}}, 1);
  EXPECT_DOUBLE_EQ(rho(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(rho(1, 1), 0.75);
}

TEST(Stationary, SymmetricChains) {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.5, 0.5, 0.5;
  auto r = stationary(a);
  EXPECT_NEAR(r.pi(0), 0.5, 1e-12);
  EXPECT_TRUE(r.ergodic);
  Eigen::MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  r = stationary(flip);
  EXPECT_NEAR(r.pi(0), 0.5, 1e-12);
  EXPECT_NEAR(r.pi(1), 0.5, 1e-12);
  EXPECT_TRUE(r.ergodic);
}

TEST(Stationary, IdentityFallsBackToUniform) {
  const auto r = stationary(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_FALSE(r.ergodic);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(r.pi(k), 0.25, 1e-12);
}

TEST(Stationary, RejectsNonStochasticRows) {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.4, 0.5, 0.5;
  EXPECT_THROW(stationary(a), ValidationError);
}

TEST(Stationary, PoissonChainIsInvariant) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    auto p = testing::random_poisson_profile(rng, 12, 30.0, 0.3);
    const auto chain = day_chain(DemandProfile{p}, 10);
    EXPECT_NEAR(chain.pi.sum(), 1.0, 1e-9);
    EXPECT_GE(chain.pi.minCoeff(), 0.0);
    EXPECT_LE((chain.pi.transpose() * chain.rho - chain.pi.transpose()).cwiseAbs().maxCoeff(), 1e-8);
    if (chain.ergodic) {
      const auto twice = stationary(chain.rho * chain.rho);
      EXPECT_LE((twice.pi - chain.pi).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(LongrunCost, DependsOnlyOnCapacity) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    const DemandProfile p = testing::random_finite_profile(rng, 3, 6);
    for (int cap = 0; cap <= 6; ++cap) {
      const double ref = longrun_cost(p, cap, 0);
      for (int b = 1; b <= cap; ++b) EXPECT_EQ(longrun_cost(p, cap - b, b), ref);
    }
  }
}

TEST(LongrunCost, RentalsOnlyStationLosesEveryRental) {
  for (int k = 1; k <= 4; ++k) {
    ArrivalSequence x(static_cast<std::size_t>(k), Customer::Rental);
    const DemandProfile p = FiniteProfile::deterministic(x);
    for (int cap = 0; cap <= 10; ++cap) EXPECT_NEAR(longrun_cost(p, cap, 0), k, 1e-12);
  }
}

bool ergodic_up_to(const DemandProfile& p, int cap) {
  for (int c = 0; c <= cap; ++c) {
    if (!day_chain(p, c).ergodic) return false;
  }
  return true;
}

// The property needs a unique stationary law at every capacity.
TEST(LongrunCost, TableIsMultimodular) {
  std::mt19937_64 rng(23);
  int checked = 0;
  while (checked < 20) {
    const auto p = testing::random_finite_profile(rng, 3, 6);
    if (!ergodic_up_to(p, 8)) continue;
    ++checked;
    EXPECT_TRUE(check_multimodular(make_longrun_cost("f", p)->table(8)).empty());
  }
  auto p = testing::random_poisson_profile(rng, 8, 30.0, 0.3);
  const auto cost = make_longrun_cost(std::make_shared<const PoissonStationModel>(p));
  EXPECT_TRUE(check_multimodular(cost->table(12)).empty());
}

// "+-" leaves every bike count fixed, so the chain is reducible from capacity 2 on.
TEST(LongrunCost, ReducibleChainUsesFallback) {
  const DemandProfile p = FiniteProfile::deterministic(seq({+1, -1}));
  EXPECT_TRUE(day_chain(p, 1).ergodic);
  EXPECT_FALSE(day_chain(p, 2).ergodic);
  EXPECT_EQ(longrun_cost(p, 1, 0), 0.0);
  EXPECT_GT(longrun_cost(p, 2, 0), 0.0);
}

TEST(LongrunCost, OracleMatchesDirectFormula) {
  std::mt19937_64 rng(24);
  const auto p = testing::random_finite_profile(rng, 3, 6);
  const auto cost = make_longrun_cost("f", p);
  for (int cap = 0; cap <= 6; ++cap) EXPECT_EQ((*cost)(cap, 0), longrun_cost(DemandProfile{p}, cap, 0));
}

}  // namespace
}  // namespace dockalloc
