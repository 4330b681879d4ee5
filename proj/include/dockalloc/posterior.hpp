#ifndef DOCKALLOC_POSTERIOR_HPP_
#define DOCKALLOC_POSTERIOR_HPP_

// After-the-fact estimates of how a capacity change altered stockouts, using the
// customers observed at the changed station.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "rng.hpp"
#include "sequence.hpp"

namespace dockalloc {

struct TimedEvent {
  double time = 0.0;  // seconds since the start of the horizon
  Customer kind = Customer::Rental;
};

struct CensoredPeriod {
  int interval = 0;
  double minutes = 0.0;
};

struct RebalancingEvent {
  double time = 0.0;
  int count = 0;  // bikes added (> 0) or removed (< 0)
};

struct ObservedDay {
  std::string station_id;
  std::vector<TimedEvent> events;  // successful customers, time-ordered
  int capacity_after = 0;          // d + b
  int bikes_at_open = 0;           // b
  int capacity_before = 0;         // d' + b'
  std::vector<CensoredPeriod> full_periods;
  std::vector<CensoredPeriod> empty_periods;
  std::vector<RebalancingEvent> rebalancing;

  void validate(const Horizon& h) const {
    const std::string tag = "day for station '" + station_id + "'";
    if (capacity_after < 0 || capacity_before < 0 || bikes_at_open < 0) {
      throw ValidationError(tag + ": negative capacity or bikes");
    }
    if (bikes_at_open > capacity_after) throw ValidationError(tag + ": more bikes than docks");
    for (std::size_t k = 0; k < events.size(); ++k) {
      if (events[k].time < 0.0) throw ValidationError(tag + ": negative event time");
      if (k > 0 && events[k].time < events[k - 1].time) {
        throw ValidationError(tag + ": events are not time-ordered");
      }
    }
    for (std::size_t k = 1; k < rebalancing.size(); ++k) {
      if (rebalancing[k].time < rebalancing[k - 1].time) {
        throw ValidationError(tag + ": rebalancing events are not time-ordered");
      }
    }
    auto check = [&](const std::vector<CensoredPeriod>& ps) {
      for (const auto& p : ps) {
        if (p.interval < 0 || p.interval >= h.intervals || p.minutes < 0.0 ||
            p.minutes > h.minutes_per_interval) {
          throw ValidationError(tag + ": censored period outside the horizon");
        }
      }
    };
    check(full_periods);
    check(empty_periods);
  }
};

enum class BikeRule { Same, Proportional };
enum class RebalancingMode { Strict, Optimistic };

inline const char* bike_rule_name(BikeRule r) noexcept {
  return r == BikeRule::Same ? "same" : "proportional";
}
inline const char* rebalancing_mode_name(RebalancingMode m) noexcept {
  return m == RebalancingMode::Strict ? "strict" : "optimistic";
}

/// Customers of x that succeed from (d, b), in order.
inline ArrivalSequence censored_subsequence(std::span<const Customer> x, int open_docks, int bikes) {
  if (open_docks < 0 || bikes < 0) throw ValidationError("censored_subsequence: negative input");
  ArrivalSequence out;
  SequenceState s{open_docks, bikes, 0};
  for (Customer c : x) {
    if (!step(s, c)) out.push_back(c);
  }
  return out;
}

/// Bikes assumed at the counterfactual station of capacity `other_capacity`.
inline int counterfactual_bikes(BikeRule rule, int bikes, int capacity, int other_capacity) {
  if (rule == BikeRule::Same || capacity == 0) {
    return std::clamp(rule == BikeRule::Same ? bikes : 0, 0, other_capacity);
  }
  // Round half up: floor((2 b C' + C) / (2 C)).
  const long long num = 2LL * bikes * other_capacity + capacity;
  const long long v = num / (2LL * capacity);
  return static_cast<int>(std::clamp<long long>(v, 0, other_capacity));
}

/// A customer stream with per-customer exemption from stockout counting.
struct Timeline {
  ArrivalSequence sequence;
  std::vector<bool> exempt;
  std::vector<double> times;
  std::vector<bool> is_virtual;

  void push(Customer c, double t, bool virt, bool ex) {
    sequence.push_back(c);
    times.push_back(t);
    is_virtual.push_back(virt);
    exempt.push_back(ex);
  }
};

/// Splices rebalanced bikes in as virtual customers (+k: k returns, -k: k rentals),
/// after every observed event at the same time. Optimistic mode exempts them.
inline Timeline rebalancing_adjustment(const ObservedDay& day, RebalancingMode mode) {
  Timeline tl;
  std::size_t r = 0;
  auto flush = [&](double upto, bool inclusive) {
    while (r < day.rebalancing.size() &&
           (inclusive ? day.rebalancing[r].time <= upto : day.rebalancing[r].time < upto)) {
      const auto& ev = day.rebalancing[r];
      const Customer c = ev.count > 0 ? Customer::Return : Customer::Rental;
      for (int k = 0; k < std::abs(ev.count); ++k) {
        tl.push(c, ev.time, true, mode == RebalancingMode::Optimistic);
      }
      ++r;
    }
  };
  for (const auto& e : day.events) {
    flush(e.time, false);
    tl.push(e.kind, e.time, false, false);
  }
  while (r < day.rebalancing.size()) flush(day.rebalancing[r].time, true);
  return tl;
}

inline Timeline plain_timeline(const ObservedDay& day) {
  Timeline tl;
  for (const auto& e : day.events) tl.push(e.kind, e.time, false, false);
  return tl;
}

inline long long count_timeline(const Timeline& tl, int open_docks, int bikes) {
  const std::size_t n = tl.exempt.size();
  auto mask = std::make_unique<bool[]>(n);
  std::copy(tl.exempt.begin(), tl.exempt.end(), mask.get());
  return count_stockouts_masked(tl.sequence, std::span<const bool>(mask.get(), n), open_docks, bikes)
      .stockouts;
}

/// Inserts sampled returns for full periods and rentals for empty periods. Within an
/// interval they go where the replayed station from (d, b) is first full (returns)
/// or empty (rentals), else at the end of the interval's block.
inline Timeline decensor(const Timeline& tl, const ObservedDay& day, const PoissonProfile& profile,
                         int open_docks, int bikes, CounterRng& rng) {
  const auto& h = profile.horizon;
  const double seconds = h.minutes_per_interval * 60.0;
  std::vector<long long> returns(h.intervals, 0);
  std::vector<long long> rentals(h.intervals, 0);
  for (const auto& p : day.full_periods) returns[p.interval] += rng.poisson(profile.return_rate[p.interval] * p.minutes);
  for (const auto& p : day.empty_periods) rentals[p.interval] += rng.poisson(profile.rental_rate[p.interval] * p.minutes);

  Timeline out;
  SequenceState s{open_docks, bikes, 0};
  std::size_t k = 0;
  auto interval_of = [&](double t) {
    return std::clamp(static_cast<int>(std::floor(t / seconds)), 0, h.intervals - 1);
  };
  for (int m = 0; m < h.intervals; ++m) {
    long long pend_ret = returns[m];
    long long pend_rent = rentals[m];
    double last_time = m * seconds;
    auto place = [&]() {
      if (pend_ret > 0 && s.open_docks == 0) {
        for (; pend_ret > 0; --pend_ret) {
          out.push(Customer::Return, last_time, false, false);
          step(s, Customer::Return);
        }
      }
      if (pend_rent > 0 && s.bikes == 0) {
        for (; pend_rent > 0; --pend_rent) {
          out.push(Customer::Rental, last_time, false, false);
          step(s, Customer::Rental);
        }
      }
    };
    place();
    while (k < tl.sequence.size() && interval_of(tl.times[k]) == m) {
      out.push(tl.sequence[k], tl.times[k], tl.is_virtual[k], tl.exempt[k]);
      last_time = tl.times[k];
      step(s, tl.sequence[k]);
      ++k;
      place();
    }
    for (; pend_ret > 0; --pend_ret) {
      out.push(Customer::Return, last_time, false, false);
      step(s, Customer::Return);
    }
    for (; pend_rent > 0; --pend_rent) {
      out.push(Customer::Rental, last_time, false, false);
      step(s, Customer::Rental);
    }
  }
  return out;
}

struct ImpactOptions {
  BikeRule rule = BikeRule::Same;
  std::optional<RebalancingMode> rebalancing;  // unset ignores rebalancing events
  long long resamples = 1000;
  std::uint64_t seed = 1;
};

/// Stockouts avoided thanks to added capacity: count(X(d, b), d', b').
inline long long added_capacity_impact(const ObservedDay& day, const ImpactOptions& opt = {}) {
  if (day.capacity_before > day.capacity_after) {
    throw ValidationError("station '" + day.station_id +
                          "': capacity decreased; use the decreased-capacity estimate");
  }
  const int b2 = counterfactual_bikes(opt.rule, day.bikes_at_open, day.capacity_after, day.capacity_before);
  const int d2 = day.capacity_before - b2;
  const Timeline tl = opt.rebalancing ? rebalancing_adjustment(day, *opt.rebalancing) : plain_timeline(day);
  return count_timeline(tl, d2, b2);
}

struct ResampledImpact {
  double mean = 0.0;
  double std_error = 0.0;
  long long resamples = 0;
  std::uint64_t seed = 0;
};

/// Extra stockouts caused by removed capacity: mean over decensored streams X-hat of
/// count(X-hat, d, b) - count(X-hat, d', b').
inline ResampledImpact decreased_capacity_impact(const ObservedDay& day, const PoissonProfile* profile,
                                                 const ImpactOptions& opt = {}) {
  if (day.capacity_before < day.capacity_after) {
    throw ValidationError("station '" + day.station_id +
                          "': capacity increased; use the added-capacity estimate");
  }
  const int d = day.capacity_after - day.bikes_at_open;
  const int b = day.bikes_at_open;
  const int b2 = counterfactual_bikes(opt.rule, b, day.capacity_after, day.capacity_before);
  const int d2 = day.capacity_before - b2;
  const Timeline tl = opt.rebalancing ? rebalancing_adjustment(day, *opt.rebalancing) : plain_timeline(day);
  const bool censored = !day.full_periods.empty() || !day.empty_periods.empty();
  ResampledImpact out;
  out.seed = opt.seed;
  if (!censored) {
    out.mean = static_cast<double>(count_timeline(tl, d, b) - count_timeline(tl, d2, b2));
    out.resamples = 1;
    return out;
  }
  if (profile == nullptr) {
    throw ValidationError("station '" + day.station_id +
                          "': censored periods present but no demand profile to fill them");
  }
  profile->validate();
  day.validate(profile->horizon);
  if (opt.resamples < 1) throw ValidationError("resamples must be positive");
  const auto n = static_cast<std::size_t>(opt.resamples);
  std::vector<double> v(n);
  parallel_for(n, [&](std::size_t r) {
    CounterRng rng(opt.seed, r);
    const Timeline hat = decensor(tl, day, *profile, d, b, rng);
    v[r] = static_cast<double>(count_timeline(hat, d, b) - count_timeline(hat, d2, b2));
  });
  double s = 0.0;
  double ss = 0.0;
  for (double x : v) {
    s += x;
    ss += x * x;
  }
  const auto nn = static_cast<double>(n);
  out.mean = s / nn;
  const double var = n > 1 ? std::max(0.0, (ss - nn * out.mean * out.mean) / (nn - 1.0)) : 0.0;
  out.std_error = std::sqrt(var / nn);
  out.resamples = opt.resamples;
  return out;
}

/// Signed change in stockouts avoided by the new capacity (positive is better).
struct DayImpact {
  std::string station_id;
  std::string direction;  // "added", "decreased" or "unchanged"
  /// [rule][column]: column 0 ignores rebalancing, column 1 applies it.
  std::array<std::array<double, 2>, 2> reduction{};
};

struct PosteriorReport {
  RebalancingMode mode = RebalancingMode::Strict;
  long long resamples = 0;
  std::uint64_t seed = 0;
  std::vector<DayImpact> days;
  std::array<std::array<double, 2>, 2> total{};
  std::vector<std::string> missing_profiles;
};

/// Evaluates every day under both bike rules, with and without rebalancing.
inline PosteriorReport posterior_report(const std::vector<ObservedDay>& days,
                                        const std::vector<PoissonProfile>& profiles,
                                        RebalancingMode mode, long long resamples, std::uint64_t seed) {
  PosteriorReport rep;
  rep.mode = mode;
  rep.resamples = resamples;
  rep.seed = seed;
  for (std::size_t k = 0; k < days.size(); ++k) {
    const auto& day = days[k];
    const PoissonProfile* prof = nullptr;
    for (const auto& p : profiles) {
      if (p.station_id == day.station_id) prof = &p;
    }
    if (prof) day.validate(prof->horizon);
    DayImpact di;
    di.station_id = day.station_id;
    di.direction = day.capacity_after > day.capacity_before   ? "added"
                   : day.capacity_after < day.capacity_before ? "decreased"
                                                              : "unchanged";
    for (int r = 0; r < 2; ++r) {
      for (int col = 0; col < 2; ++col) {
        ImpactOptions opt;
        opt.rule = r == 0 ? BikeRule::Same : BikeRule::Proportional;
        if (col == 1) opt.rebalancing = mode;
        opt.resamples = resamples;
        opt.seed = seed + k;
        double value = 0.0;
        if (day.capacity_after >= day.capacity_before) {
          value = static_cast<double>(added_capacity_impact(day, opt));
        } else {
          value = 0.0 - decreased_capacity_impact(day, prof, opt).mean;  // never -0.0
        }
        di.reduction[r][col] = value;
        rep.total[r][col] += value;
      }
    }
    rep.days.push_back(std::move(di));
  }
  return rep;
}

}  // namespace dockalloc

#endif  // DOCKALLOC_POSTERIOR_HPP_
