#ifndef DOCKALLOC_SCALING_HPP_
#define DOCKALLOC_SCALING_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "allocator.hpp"

namespace dockalloc {

enum class Solver { Greedy, Scaling, Hybrid };

inline Solver parse_solver(const std::string& s) {
  if (s == "greedy") return Solver::Greedy;
  if (s == "scaling") return Solver::Scaling;
  if (s == "hybrid") return Solver::Hybrid;
  throw ValidationError("unknown solver '" + s + "' (expected greedy, scaling or hybrid)");
}

inline const char* solver_name(Solver s) noexcept {
  switch (s) {
    case Solver::Greedy: return "greedy";
    case Solver::Scaling: return "scaling";
    case Solver::Hybrid: return "hybrid";
  }
  return "?";
}

struct PhasePlan {
  std::vector<int> steps;  // strictly decreasing, positive

  void validate() const {
    if (steps.empty()) throw ValidationError("phase plan: no steps");
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (steps[k] < 1) throw ValidationError("phase plan: steps must be positive");
      if (k > 0 && steps[k] >= steps[k - 1]) {
        throw ValidationError("phase plan: steps must be strictly decreasing");
      }
    }
  }
};

/// Powers of two from 2^floor(log2(total)) down to 1.
inline PhasePlan powers_of_two_plan(long long total) {
  PhasePlan p;
  if (total < 1) total = 1;
  const int top = std::bit_width(static_cast<std::uint64_t>(total)) - 1;
  for (int e = top; e >= 0; --e) p.steps.push_back(1 << e);
  return p;
}

/// Plan for a solver. With granularity g > 1, only steps that are multiples of g and
/// at least g survive, and g itself closes the plan.
inline PhasePlan make_plan(Solver solver, long long total_capacity, int granularity = 1) {
  if (granularity < 1) throw ValidationError("granularity must be positive");
  PhasePlan base;
  switch (solver) {
    case Solver::Greedy: base.steps = {1}; break;
    case Solver::Scaling: base = powers_of_two_plan(total_capacity); break;
    case Solver::Hybrid: base.steps = {8, 4, 1}; break;
  }
  if (granularity == 1) return base;
  PhasePlan p;
  for (int s : base.steps) {
    if (s >= granularity && s % granularity == 0) p.steps.push_back(s);
  }
  if (p.steps.empty() || p.steps.back() != granularity) p.steps.push_back(granularity);
  return p;
}

struct PhaseStats {
  int step = 1;
  int bike_transfers = 0;
  int dock_moves = 0;
  long long projected_docks = 0;  // constrained variant only
  long long move_budget = -1;     // constrained variant only; -1 when unbounded
  double objective = 0.0;
  long long new_rows = 0;         // cost rows first materialised in this phase
};

struct ScaledResult {
  OptimizeResult result;
  std::vector<PhaseStats> phases;
  /// Materialised rows per capacity over all stations at the end of the run.
  std::map<int, long long> rows_by_capacity;
};

namespace detail {

inline long long materialised_rows(const std::vector<StationCostPtr>& costs) {
  long long s = 0;
  for (const auto& c : costs) s += static_cast<long long>(c->computed_capacities().size());
  return s;
}

inline std::map<int, long long> rows_by_capacity(const std::vector<StationCostPtr>& costs) {
  std::map<int, long long> out;
  for (const auto& c : costs) {
    for (int cap : c->computed_capacities()) ++out[cap];
  }
  return out;
}

inline int bike_phase(DescentEngine& eng) {
  int count = 0;
  while (auto t = eng.best_bike_transfer()) {
    eng.apply(*t);
    ++count;
  }
  return count;
}

/// Moves the real capacities back toward the baseline with balanced o/e moves of
/// `step` docks, at most `radius` docks per station. Returns docks moved.
inline long long project_toward(DescentEngine& eng, const std::vector<int>& base, int step,
                                long long radius) {
  const std::size_t n = base.size();
  std::vector<long long> give(n, 0);
  std::vector<long long> take(n, 0);
  long long total_give = 0;
  long long total_take = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long long diff = eng.capacity(i) - base[i];
    const long long lim = radius / step * step;
    if (diff > 0) give[i] = std::min(diff / step * step, lim);
    if (diff < 0) take[i] = std::min(-diff / step * step, lim);
    total_give += give[i];
    total_take += take[i];
  }
  long long remaining = std::min(total_give, total_take) / step;
  long long moved = 0;
  std::size_t gi = 0;
  std::size_t tj = 0;
  while (remaining > 0) {
    while (give[gi] < step) ++gi;
    while (take[tj] < step) ++tj;
    const int i = static_cast<int>(gi);
    const int j = static_cast<int>(tj);
    DockMove mv;
    mv.i = i;
    mv.j = j;
    mv.step = step;
    mv.kind = eng.open_docks()[gi] >= step ? MoveKind::OpenDock : MoveKind::FullDock;
    eng.apply(mv);
    give[gi] -= step;
    take[tj] -= step;
    moved += step;
    --remaining;
  }
  return moved;
}

}  // namespace detail

/// Phase-by-phase descent with strides from `plan`; z must be unbounded.
inline ScaledResult optimize_scaled(const Constraints& c, const std::vector<StationCostPtr>& costs,
                                    const PhasePlan& plan) {
  plan.validate();
  if (c.max_moves) {
    throw ValidationError("optimize_scaled: move bound given; use optimize_scaled_constrained");
  }
  check_constraints(c, costs);
  ScaledResult out;
  long long rows = detail::materialised_rows(costs);
  auto eng = detail::start_engine(detail::with_depot(c, costs), detail::capacities_with_depot(c),
                                  c.bikes, plan.steps.front(), c.threshold);
  const double start = eng.objective();
  MoveLog log;
  for (int step : plan.steps) {
    PhaseStats ps;
    ps.step = step;
    eng.set_step(step);
    ps.bike_transfers = detail::bike_phase(eng);
    auto part = detail::descend(eng, std::numeric_limits<long long>::max(),
                                static_cast<int>(log.size()) + 1);
    ps.dock_moves = static_cast<int>(part.size());
    log.insert(log.end(), part.begin(), part.end());
    ps.objective = eng.objective();
    const long long now = detail::materialised_rows(costs);
    ps.new_rows = now - rows;
    rows = now;
    out.phases.push_back(ps);
  }
  out.result = detail::collect(eng, costs.size(), start, std::move(log));
  out.rows_by_capacity = detail::rows_by_capacity(costs);
  return out;
}

struct ConstrainedScalingOptions {
  /// Per-station projection radius in units of the phase step; unset means 8 n^3.
  std::optional<long long> radius_factor;
};

/// Scaling under a finite move bound z. Before each later phase the incumbent is
/// pulled toward the baseline; each phase then spends what is left of the 2z
/// distance budget.
inline ScaledResult optimize_scaled_constrained(const Constraints& c,
                                                const std::vector<StationCostPtr>& costs,
                                                const PhasePlan& plan,
                                                ConstrainedScalingOptions opt = {}) {
  plan.validate();
  if (!c.max_moves) throw ValidationError("optimize_scaled_constrained: move bound required");
  check_constraints(c, costs);
  const long long z = *c.max_moves;
  const auto base = c.baseline.capacities();
  const long long n = static_cast<long long>(costs.size()) + 1;
  const long long factor = opt.radius_factor.value_or(8 * n * n * n);
  ScaledResult out;
  long long rows = detail::materialised_rows(costs);
  auto eng = detail::start_engine(detail::with_depot(c, costs), detail::capacities_with_depot(c),
                                  c.bikes, plan.steps.front(), c.threshold);
  const double start = eng.objective();
  MoveLog log;
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const int step = plan.steps[k];
    PhaseStats ps;
    ps.step = step;
    eng.set_step(step);
    if (k > 0) ps.projected_docks = detail::project_toward(eng, base, step, factor * step);
    ps.bike_transfers = detail::bike_phase(eng);
    std::vector<int> cap(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) cap[i] = eng.capacity(i);
    const long long slack = 2 * z - dock_distance(cap, base);
    ps.move_budget = std::max(0LL, slack / (2LL * step));
    auto part = detail::descend(eng, ps.move_budget, static_cast<int>(log.size()) + 1);
    ps.dock_moves = static_cast<int>(part.size());
    log.insert(log.end(), part.begin(), part.end());
    ps.objective = eng.objective();
    const long long now = detail::materialised_rows(costs);
    ps.new_rows = now - rows;
    rows = now;
    out.phases.push_back(ps);
  }
  out.result = detail::collect(eng, costs.size(), start, std::move(log));
  out.rows_by_capacity = detail::rows_by_capacity(costs);
  return out;
}

/// Dispatches on the presence of a move bound.
inline ScaledResult solve(const Constraints& c, const std::vector<StationCostPtr>& costs,
                          const PhasePlan& plan) {
  if (c.max_moves) return optimize_scaled_constrained(c, costs, plan);
  return optimize_scaled(c, costs, plan);
}

}  // namespace dockalloc

#endif  // DOCKALLOC_SCALING_HPP_
