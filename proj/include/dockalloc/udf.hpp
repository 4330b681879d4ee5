#ifndef DOCKALLOC_UDF_HPP_
#define DOCKALLOC_UDF_HPP_

// User dissatisfaction functions: expected out-of-stock events over one day as a
// function of the opening number of empty docks d and bikes b at a station.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "error.hpp"
#include "profile.hpp"
#include "sequence.hpp"

namespace dockalloc {

/// Expected stockouts under a finite sequence distribution. The residual mass is the
/// empty sequence and contributes nothing.
inline double expected_cost_finite(const FiniteProfile& profile, int open_docks, int bikes) {
  profile.validate();
  double total = 0.0;
  for (const auto& atom : profile.atoms) {
    if (atom.probability == 0.0) continue;
    total += atom.probability * count_stockouts(atom.sequence, open_docks, bikes).stockouts;
  }
  return total;
}

/// One interval of constant rates, for every starting bike count x in {0..C}.
struct IntervalResult {
  Eigen::MatrixXd transition;        // transition(x, y) = P(y bikes at end | x at start)
  std::vector<double> expected_events;  // expected stockouts during the interval from x
};

inline constexpr double kUniformizationTolerance = 1e-10;
inline constexpr int kDefaultCapacityCap = 512;

namespace detail {

/// Poisson(a) jump-count weights for uniformization, truncated once the neglected
/// tail drops below `tol`. `occupation[k]` is the integral over [0,T] of the
/// probability of exactly k jumps, i.e. P(N >= k+1) / rate.
struct JumpWeights {
  std::vector<double> pmf;
  std::vector<double> occupation;
};

inline JumpWeights jump_weights(double rate, double duration, double tol) {
  JumpWeights w;
  const double a = rate * duration;
  double cdf = 0.0;
  for (int k = 0;; ++k) {
    const double p =
        std::exp(-a + (k == 0 ? 0.0 : k * std::log(a)) - std::lgamma(static_cast<double>(k) + 1.0));
    cdf += p;
    const double tail = std::max(0.0, 1.0 - cdf);
    w.pmf.push_back(p);
    w.occupation.push_back(tail / rate);
    if (k >= a && tail * (2.0 + std::sqrt(a)) < tol) break;
  }
  // Fold the truncated mass back in so transition rows stay stochastic.
  const double mass = cdf;
  for (double& p : w.pmf) p /= mass;
  return w;
}

/// Uniformized birth-death kernel on {0..C}: up with prob up_p except at C,
/// down with prob down_p except at 0, otherwise stay.
struct BirthDeathKernel {
  int capacity;
  double up_p;
  double down_p;

  /// out = P v (column action: out[x] = E[v(next) | x]).
  void apply(const std::vector<double>& v, std::vector<double>& out) const {
    const int c = capacity;
    for (int x = 0; x <= c; ++x) {
      double stay = 1.0;
      double acc = 0.0;
      if (x < c) {
        acc += up_p * v[x + 1];
        stay -= up_p;
      }
      if (x > 0) {
        acc += down_p * v[x - 1];
        stay -= down_p;
      }
      out[x] = acc + stay * v[x];
    }
  }

  /// out = M P for a dense row-major propagation matrix M.
  void right_multiply(const Eigen::MatrixXd& m, Eigen::MatrixXd& out) const {
    const int c = capacity;
    out.setZero(m.rows(), m.cols());
    for (int y = 0; y <= c; ++y) {
      double stay = 1.0;
      if (y < c) {
        out.col(y + 1) += up_p * m.col(y);
        stay -= up_p;
      }
      if (y > 0) {
        out.col(y - 1) += down_p * m.col(y);
        stay -= down_p;
      }
      out.col(y) += stay * m.col(y);
    }
  }
};

inline void check_rates(double rental_rate, double return_rate, double duration, int capacity) {
  if (!std::isfinite(rental_rate) || !std::isfinite(return_rate) || rental_rate < 0.0 ||
      return_rate < 0.0) {
    throw ValidationError("interval rates must be finite and non-negative");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("interval duration must be positive");
  }
  if (capacity < 0) throw ValidationError("capacity must be non-negative");
}

/// Stockout intensity per state: returns fail when full, rentals fail when empty.
inline std::vector<double> failure_rate(double rental_rate, double return_rate, int capacity) {
  std::vector<double> f(static_cast<std::size_t>(capacity) + 1, 0.0);
  f[capacity] += return_rate;
  f[0] += rental_rate;
  return f;
}

/// Backward step over one interval: returns e + T g where e is the interval's
/// expected stockouts and T its transition kernel, via Horner evaluation of the
/// uniformization series.
inline std::vector<double> propagate_cost(double rental_rate, double return_rate, double duration,
                                          int capacity, const std::vector<double>& g,
                                          double tol) {
  const double total = rental_rate + return_rate;
  if (total == 0.0) return g;
  const JumpWeights w = jump_weights(total, duration, tol);
  const BirthDeathKernel kernel{capacity, return_rate / total, rental_rate / total};
  const std::vector<double> f = failure_rate(rental_rate, return_rate, capacity);
  const std::size_t n = g.size();
  std::vector<double> r(n), tmp(n);
  const std::size_t last = w.pmf.size() - 1;
  for (std::size_t x = 0; x < n; ++x) r[x] = w.pmf[last] * g[x] + w.occupation[last] * f[x];
  for (std::size_t k = last; k-- > 0;) {
    kernel.apply(r, tmp);
    for (std::size_t x = 0; x < n; ++x) r[x] = w.pmf[k] * g[x] + w.occupation[k] * f[x] + tmp[x];
  }
  return r;
}

}  // namespace detail

/// Birth-death analysis of one constant-rate interval via uniformization.
/// Bikes rise at `return_rate` (blocked at C) and fall at `rental_rate` (blocked at 0).
inline IntervalResult interval_cost_poisson(double rental_rate, double return_rate,
                                            double duration, int capacity,
                                            double tol = kUniformizationTolerance) {
  detail::check_rates(rental_rate, return_rate, duration, capacity);
  const int n = capacity + 1;
  IntervalResult out;
  const double total = rental_rate + return_rate;
  if (total == 0.0) {
    out.transition = Eigen::MatrixXd::Identity(n, n);
    out.expected_events.assign(n, 0.0);
    return out;
  }
  const detail::JumpWeights w = detail::jump_weights(total, duration, tol);
  const detail::BirthDeathKernel kernel{capacity, return_rate / total, rental_rate / total};

  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd next(n, n);
  out.transition = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> f = detail::failure_rate(rental_rate, return_rate, capacity);
  std::vector<double> events(n, 0.0), tmp(n);
  for (std::size_t k = 0; k < w.pmf.size(); ++k) {
    out.transition += w.pmf[k] * power;
    for (int x = 0; x < n; ++x) events[x] += w.occupation[k] * f[x];
    if (k + 1 == w.pmf.size()) break;
    kernel.right_multiply(power, next);
    power.swap(next);
    kernel.apply(f, tmp);
    f.swap(tmp);
  }
  out.expected_events = std::move(events);
  return out;
}

/// Tabulated c(d, b) for all d + b <= max_capacity. rows[s][b] = c(s - b, b).
class CostTable {
 public:
  CostTable() = default;
  CostTable(std::string station_id, std::vector<std::vector<double>> rows,
            std::string provenance = "finite")
      : station_id_(std::move(station_id)), rows_(std::move(rows)),
        provenance_(std::move(provenance)) {
    for (std::size_t s = 0; s < rows_.size(); ++s) {
      if (rows_[s].size() != s + 1) {
        throw ValidationError("cost table '" + station_id_ + "': row " + std::to_string(s) +
                              " must have " + std::to_string(s + 1) + " entries");
      }
      for (double v : rows_[s]) {
        if (!std::isfinite(v) || v < 0.0) {
          throw ValidationError("cost table '" + station_id_ +
                                "': values must be finite and non-negative");
        }
      }
    }
  }

  [[nodiscard]] const std::string& station_id() const noexcept { return station_id_; }
  [[nodiscard]] int max_capacity() const noexcept { return static_cast<int>(rows_.size()) - 1; }
  [[nodiscard]] const std::string& provenance() const noexcept { return provenance_; }
  [[nodiscard]] const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

  [[nodiscard]] double at(int open_docks, int bikes) const {
    const int s = open_docks + bikes;
    if (open_docks < 0 || bikes < 0 || s > max_capacity()) {
      throw ValidationError("cost table '" + station_id_ + "': (" + std::to_string(open_docks) +
                            "," + std::to_string(bikes) + ") outside table");
    }
    return rows_[s][bikes];
  }

 private:
  std::string station_id_;
  std::vector<std::vector<double>> rows_;
  std::string provenance_;
};

/// Cached per-capacity computations for one Poisson-profile station. Daily costs
/// use vector recursions only; interval transition matrices are built on demand.
class PoissonStationModel {
 public:
  explicit PoissonStationModel(PoissonProfile profile, int capacity_cap = kDefaultCapacityCap,
                               double tol = kUniformizationTolerance)
      : profile_(std::move(profile)), capacity_cap_(capacity_cap), tol_(tol) {
    profile_.validate();
  }

  [[nodiscard]] const PoissonProfile& profile() const noexcept { return profile_; }
  [[nodiscard]] int capacity_cap() const noexcept { return capacity_cap_; }

  /// Expected daily stockouts from every starting bike count at capacity C:
  /// entry x is c(C - x, x).
  [[nodiscard]] std::vector<double> daily_row(int capacity) const {
    check_capacity(capacity);
    const auto& p = profile_;
    std::vector<double> g(static_cast<std::size_t>(capacity) + 1, 0.0);
    for (int m = p.horizon.intervals; m-- > 0;) {
      g = detail::propagate_cost(p.rental_rate[m], p.return_rate[m], p.horizon.minutes_per_interval,
                                 capacity, g, tol_);
    }
    return g;
  }

  /// Interval results at capacity C, computed once and shared.
  [[nodiscard]] std::shared_ptr<const std::vector<IntervalResult>> intervals(int capacity) const {
    check_capacity(capacity);
    std::lock_guard lock(mu_);
    auto it = intervals_.find(capacity);
    if (it != intervals_.end()) return it->second;
    auto results = std::make_shared<std::vector<IntervalResult>>();
    const auto& p = profile_;
    results->reserve(p.horizon.intervals);
    for (int m = 0; m < p.horizon.intervals; ++m) {
      results->push_back(interval_cost_poisson(p.rental_rate[m], p.return_rate[m],
                                               p.horizon.minutes_per_interval, capacity, tol_));
    }
    intervals_.emplace(capacity, results);
    return results;
  }

 private:
  void check_capacity(int capacity) const {
    if (capacity < 0) throw ValidationError("capacity must be non-negative");
    if (capacity > capacity_cap_) throw CapacityLimitError(capacity, capacity_cap_);
  }

  PoissonProfile profile_;
  int capacity_cap_;
  double tol_;
  mutable std::mutex mu_;
  mutable std::map<int, std::shared_ptr<const std::vector<IntervalResult>>> intervals_;
};

/// Eager daily cost table for all capacities 0..C.
inline CostTable daily_cost_poisson(const PoissonProfile& profile, int capacity,
                                    int capacity_cap = kDefaultCapacityCap) {
  if (capacity > capacity_cap) throw CapacityLimitError(capacity, capacity_cap);
  PoissonStationModel model(profile, capacity_cap);
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(capacity) + 1);
  for (int s = 0; s <= capacity; ++s) rows.push_back(model.daily_row(s));
  return CostTable(profile.station_id, std::move(rows), "poisson");
}

/// Eager table for a finite profile.
inline CostTable finite_cost_table(std::string station_id, const FiniteProfile& profile,
                                   int capacity) {
  profile.validate();
  std::vector<std::vector<double>> rows;
  for (int s = 0; s <= capacity; ++s) {
    std::vector<double> row(static_cast<std::size_t>(s) + 1);
    for (int b = 0; b <= s; ++b) row[b] = expected_cost_finite(profile, s - b, b);
    rows.push_back(std::move(row));
  }
  return CostTable(std::move(station_id), std::move(rows), "finite");
}

struct MultimodularViolation {
  int inequality = 0;  // 1..5
  int open_docks = 0;
  int bikes = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

inline constexpr double kMultimodularTolerance = 1e-9;

/// Evaluates the multimodular difference inequalities at every point where all
/// terms lie inside the table. Inequality 6 coincides with 1 term by term and is
/// reported under 1.
inline std::vector<MultimodularViolation> check_multimodular(
    const CostTable& table, double tol = kMultimodularTolerance) {
  std::vector<MultimodularViolation> out;
  const int cap = table.max_capacity();
  auto f = [&](int d, int b) { return table.at(d, b); };
  auto record = [&](int which, int d, int b, double lhs, double rhs) {
    if (lhs < rhs - tol) out.push_back({which, d, b, lhs, rhs});
  };
  for (int s = 0; s <= cap; ++s) {
    for (int b = 0; b <= s; ++b) {
      const int d = s - b;
      if (s + 2 <= cap) {
        record(1, d, b, f(d + 1, b + 1) - f(d + 1, b), f(d, b + 1) - f(d, b));
      }
      if (d >= 1 && b >= 1) {
        record(2, d, b, f(d - 1, b + 1) - f(d - 1, b), f(d, b) - f(d, b - 1));
        record(3, d, b, f(d + 1, b - 1) - f(d, b - 1), f(d, b) - f(d - 1, b));
      }
      if (s + 2 <= cap) {
        record(4, d, b, f(d + 2, b) - f(d + 1, b), f(d + 1, b) - f(d, b));
        record(5, d, b, f(d, b + 2) - f(d, b + 1), f(d, b + 1) - f(d, b));
      }
    }
  }
  return out;
}

}  // namespace dockalloc

#endif  // DOCKALLOC_UDF_HPP_
