#ifndef DOCKALLOC_DEMAND_HPP_
#define DOCKALLOC_DEMAND_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"
#include "profile.hpp"
#include "sequence.hpp"

namespace dockalloc {

struct TripRecord {
  std::string station_id;
  double timestamp = 0.0;  // seconds since midnight
  Customer kind = Customer::Rental;
};

struct StatusRecord {
  std::string station_id;
  int interval = 0;  // relative to the horizon start
  double minutes_nonempty = 0.0;
  double minutes_nonfull = 0.0;
};

inline constexpr double kMinuteFloor = 1.0;

struct StationEstimate {
  PoissonProfile profile;
  /// "censored_fallback:rental:<interval>" or "censored_fallback:return:<interval>".
  std::vector<std::string> flags;
};

struct EstimateResult {
  Horizon horizon;
  std::vector<StationEstimate> stations;  // sorted by id
  long long trips_outside_horizon = 0;
};

/// Horizon interval of a time of day, or -1 outside the horizon.
inline int horizon_bucket(const Horizon& h, double seconds_of_day) {
  double t = std::fmod(seconds_of_day - h.start_hour * 3600.0, 86400.0);
  if (t < 0.0) t += 86400.0;
  const auto k = static_cast<long long>(std::floor(t / (h.minutes_per_interval * 60.0)));
  return k < h.intervals ? static_cast<int>(k) : -1;
}

/// Rates per minute: events in a bucket over the minutes the station could serve them
/// (non-empty for rentals, non-full for returns), summed across days. A zero
/// denominator with events is floored at one minute and flagged.
inline EstimateResult estimate_rates(const std::vector<TripRecord>& trips,
                                     const std::vector<StatusRecord>& status, int days,
                                     const Horizon& horizon = {}) {
  if (days < 1) throw ValidationError("estimate_rates: days must be at least 1");
  if (horizon.intervals <= 0 || !(horizon.minutes_per_interval > 0.0) || horizon.start_hour < 0 ||
      horizon.start_hour > 23) {
    throw ValidationError("estimate_rates: invalid horizon");
  }
  const auto n = static_cast<std::size_t>(horizon.intervals);
  struct Acc {
    std::vector<double> rentals, returns, nonempty, nonfull;
    bool has_status = false;
  };
  std::map<std::string, Acc> acc;
  auto slot = [&](const std::string& id) -> Acc& {
    auto& a = acc[id];
    if (a.rentals.empty()) {
      a.rentals.assign(n, 0.0);
      a.returns.assign(n, 0.0);
      a.nonempty.assign(n, 0.0);
      a.nonfull.assign(n, 0.0);
    }
    return a;
  };
  std::map<std::string, bool> trip_stations;
  for (std::size_t k = 0; k < trips.size(); ++k) {
    const auto& t = trips[k];
    if (!(t.timestamp >= 0.0) || t.timestamp >= 86400.0) {
      throw ValidationError("trip record " + std::to_string(k) + " (station '" + t.station_id +
                            "'): timestamp must lie in [0, 86400)");
    }
    trip_stations[t.station_id] = true;
  }
  const double len = horizon.minutes_per_interval;
  for (std::size_t k = 0; k < status.size(); ++k) {
    const auto& s = status[k];
    const std::string tag = "status record " + std::to_string(k) + " (station '" + s.station_id + "')";
    if (s.interval < 0 || s.interval >= horizon.intervals) {
      throw ValidationError(tag + ": interval outside the horizon");
    }
    if (!(s.minutes_nonempty >= 0.0) || !(s.minutes_nonfull >= 0.0) || s.minutes_nonempty > len ||
        s.minutes_nonfull > len) {
      throw ValidationError(tag + ": minutes must lie in [0, " + std::to_string(len) + "]");
    }
    if (!trip_stations.count(s.station_id)) continue;
    auto& a = slot(s.station_id);
    a.has_status = true;
    a.nonempty[s.interval] += s.minutes_nonempty;
    a.nonfull[s.interval] += s.minutes_nonfull;
  }
  EstimateResult out;
  out.horizon = horizon;
  for (const auto& t : trips) {
    auto& a = slot(t.station_id);
    if (!a.has_status) {
      throw ValidationError("station '" + t.station_id + "' has trips but no status records");
    }
    const int m = horizon_bucket(horizon, t.timestamp);
    if (m < 0) {
      ++out.trips_outside_horizon;
      continue;
    }
    (t.kind == Customer::Rental ? a.rentals : a.returns)[m] += 1.0;
  }
  for (const auto& [id, a] : acc) {
    for (std::size_t m = 0; m < n; ++m) {
      if (a.nonempty[m] > days * len + 1e-9 || a.nonfull[m] > days * len + 1e-9) {
        throw ValidationError("station '" + id + "': more status minutes in interval " +
                              std::to_string(m) + " than " + std::to_string(days) + " days allow");
      }
    }
    StationEstimate est;
    est.profile.station_id = id;
    est.profile.horizon = horizon;
    est.profile.rental_rate.resize(n);
    est.profile.return_rate.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      auto rate = [&](double count, double minutes, const char* kind) {
        if (minutes > 0.0) return count / minutes;
        if (count > 0.0) est.flags.push_back(std::string("censored_fallback:") + kind + ":" + std::to_string(m));
        return count / kMinuteFloor;
      };
      est.profile.rental_rate[m] = rate(a.rentals[m], a.nonempty[m], "rental");
      est.profile.return_rate[m] = rate(a.returns[m], a.nonfull[m], "return");
    }
    out.stations.push_back(std::move(est));
  }
  return out;
}

}  // namespace dockalloc

#endif  // DOCKALLOC_DEMAND_HPP_
