#ifndef DOCKALLOC_LONGRUN_HPP_
#define DOCKALLOC_LONGRUN_HPP_

// Long-run average cost when bikes are never rebalanced overnight: the day-start
// bike count follows the stationary law of the day-to-day Markov chain.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cost_oracle.hpp"
#include "error.hpp"
#include "profile.hpp"
#include "sequence.hpp"
#include "udf.hpp"

namespace dockalloc {

struct DayChain {
  Eigen::MatrixXd rho;  // rho(x, y) = P(end day with y bikes | start with x)
  Eigen::VectorXd pi;
  bool ergodic = true;
};

struct StationaryResult {
  Eigen::VectorXd pi;
  bool ergodic = true;  // false when the chain has no unique stationary law
};

inline constexpr double kStochasticTolerance = 1e-9;
inline constexpr double kRankThreshold = 1e-10;
inline constexpr double kFallbackDamping = 0.99;

/// Day transition for a finite profile at capacity C, by simulating every atom from
/// every start state. Residual mass leaves the bike count unchanged.
inline Eigen::MatrixXd day_transition(const FiniteProfile& profile, int capacity) {
  profile.validate();
  if (capacity < 0) throw ValidationError("capacity must be non-negative");
  const int n = capacity + 1;
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n, n);
  const double residual = std::max(0.0, 1.0 - profile.total_mass());
  for (int x = 0; x <= capacity; ++x) {
    for (const auto& atom : profile.atoms) {
      const auto r = count_stockouts(atom.sequence, capacity - x, x);
      rho(x, r.final_state.bikes) += atom.probability;
    }
    rho(x, x) += residual;
  }
  return rho;
}

/// Day transition for a Poisson profile: the product of the interval kernels.
inline Eigen::MatrixXd day_transition(const PoissonStationModel& model, int capacity) {
  const auto intervals = model.intervals(capacity);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(capacity + 1, capacity + 1);
  for (const auto& iv : *intervals) rho = rho * iv.transition;
  return rho;
}

inline Eigen::MatrixXd day_transition(const DemandProfile& profile, int capacity) {
  if (const auto* f = std::get_if<FiniteProfile>(&profile)) return day_transition(*f, capacity);
  return day_transition(PoissonStationModel(std::get<PoissonProfile>(profile)), capacity);
}

/// Stationary distribution of a row-stochastic matrix. Solves pi (rho - I) = 0 with
/// sum(pi) = 1 directly; when the solution is not unique, returns the fixed point of
/// the power iteration damped toward the uniform law and clears the ergodic flag.
inline StationaryResult stationary(const Eigen::MatrixXd& rho) {
  const Eigen::Index n = rho.rows();
  if (n == 0 || rho.cols() != n) throw ValidationError("stationary: matrix must be square");
  for (Eigen::Index x = 0; x < n; ++x) {
    if ((rho.row(x).array() < -kStochasticTolerance).any() ||
        std::abs(rho.row(x).sum() - 1.0) > kStochasticTolerance) {
      throw ValidationError("stationary: row " + std::to_string(x) + " is not stochastic");
    }
  }
  StationaryResult out;
  const Eigen::MatrixXd a = rho.transpose() - Eigen::MatrixXd::Identity(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(kRankThreshold);
  if (lu.rank() == n - 1) {
    Eigen::MatrixXd sys = a;
    sys.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    out.pi = sys.fullPivLu().solve(rhs);
    out.ergodic = true;
  } else {
    // pi = d pi rho + (1 - d) u  <=>  (I - d rho^T) pi = (1 - d) u
    const Eigen::MatrixXd sys =
        Eigen::MatrixXd::Identity(n, n) - kFallbackDamping * rho.transpose();
    const Eigen::VectorXd rhs =
        Eigen::VectorXd::Constant(n, (1.0 - kFallbackDamping) / static_cast<double>(n));
    out.pi = sys.partialPivLu().solve(rhs);
    out.ergodic = false;
  }
  out.pi = out.pi.cwiseMax(0.0);
  out.pi /= out.pi.sum();
  return out;
}

inline double mix_daily_costs(const Eigen::VectorXd& pi, const std::vector<double>& daily_row) {
  double total = 0.0;
  for (std::size_t k = 0; k < daily_row.size(); ++k) total += pi(static_cast<Eigen::Index>(k)) * daily_row[k];
  return total;
}

inline DayChain day_chain(const DemandProfile& profile, int capacity) {
  DayChain chain;
  chain.rho = day_transition(profile, capacity);
  auto st = stationary(chain.rho);
  chain.pi = std::move(st.pi);
  chain.ergodic = st.ergodic;
  return chain;
}

/// Long-run average stockouts per day; depends only on d + b.
inline double longrun_cost(const DemandProfile& profile, int open_docks, int bikes) {
  if (open_docks < 0 || bikes < 0) throw ValidationError("longrun_cost: negative docks or bikes");
  const int cap = open_docks + bikes;
  std::vector<double> daily(static_cast<std::size_t>(cap) + 1);
  if (const auto* f = std::get_if<FiniteProfile>(&profile)) {
    for (int k = 0; k <= cap; ++k) daily[k] = expected_cost_finite(*f, cap - k, k);
    return mix_daily_costs(stationary(day_transition(*f, cap)).pi, daily);
  }
  PoissonStationModel model(std::get<PoissonProfile>(profile));
  return mix_daily_costs(stationary(day_transition(model, cap)).pi, model.daily_row(cap));
}

/// Long-run cost oracle: every row is constant at c^pi(C), so allocators consume it
/// through the same interface as daily costs.
inline StationCostPtr make_longrun_cost(std::string id, FiniteProfile profile) {
  profile.validate();
  auto fn = [p = std::move(profile)](int capacity) {
    std::vector<double> daily(static_cast<std::size_t>(capacity) + 1);
    for (int k = 0; k <= capacity; ++k) daily[k] = expected_cost_finite(p, capacity - k, k);
    const double v = mix_daily_costs(stationary(day_transition(p, capacity)).pi, daily);
    return StationCost::Row(static_cast<std::size_t>(capacity) + 1, v);
  };
  auto sc = std::make_shared<StationCost>(std::move(id), kUnboundedCapacity, std::move(fn));
  sc->set_provenance("longrun-finite");
  return sc;
}

inline StationCostPtr make_longrun_cost(std::shared_ptr<const PoissonStationModel> model) {
  const std::string id = model->profile().station_id;
  const int cap = model->capacity_cap();
  auto fn = [m = std::move(model)](int capacity) {
    const double v =
        mix_daily_costs(stationary(day_transition(*m, capacity)).pi, m->daily_row(capacity));
    return StationCost::Row(static_cast<std::size_t>(capacity) + 1, v);
  };
  auto sc = std::make_shared<StationCost>(id, cap, std::move(fn));
  sc->set_provenance("longrun-poisson");
  return sc;
}

}  // namespace dockalloc

#endif  // DOCKALLOC_LONGRUN_HPP_
