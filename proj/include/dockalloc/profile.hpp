#ifndef DOCKALLOC_PROFILE_HPP_
#define DOCKALLOC_PROFILE_HPP_

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "sequence.hpp"

namespace dockalloc {

/// A demand profile given as a finite distribution over arrival sequences.
/// Probabilities may sum to less than one; the remainder is the empty sequence.
struct FiniteProfile {
  struct Atom {
    ArrivalSequence sequence;
    double probability = 0.0;
  };
  std::vector<Atom> atoms;

  static FiniteProfile deterministic(ArrivalSequence seq) { return {{{std::move(seq), 1.0}}}; }

  [[nodiscard]] double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.probability;
    return s;
  }

  void validate() const {
    for (const auto& a : atoms) {
      if (!(a.probability >= 0.0) || !std::isfinite(a.probability)) {
        throw ValidationError("finite profile: probabilities must be finite and non-negative");
      }
    }
    if (total_mass() > 1.0 + 1e-12) {
      throw ValidationError("finite profile: probabilities sum to more than one");
    }
  }
};

/// Time discretisation of one planning day.
struct Horizon {
  int intervals = 48;
  double minutes_per_interval = 30.0;
  int start_hour = 0;

  [[nodiscard]] double total_minutes() const { return intervals * minutes_per_interval; }

  friend bool operator==(const Horizon&, const Horizon&) = default;
};

/// Piecewise-constant Poisson arrival rates (per minute), one value per horizon interval.
struct PoissonProfile {
  std::string station_id;
  Horizon horizon;
  std::vector<double> rental_rate;
  std::vector<double> return_rate;

  void validate() const {
    if (horizon.intervals <= 0 || !(horizon.minutes_per_interval > 0.0)) {
      throw ValidationError("poisson profile '" + station_id + "': empty horizon");
    }
    const auto n = static_cast<std::size_t>(horizon.intervals);
    if (rental_rate.size() != n || return_rate.size() != n) {
      throw ValidationError("poisson profile '" + station_id + "': expected " +
                            std::to_string(n) + " rates per direction");
    }
    for (std::size_t m = 0; m < n; ++m) {
      if (!std::isfinite(rental_rate[m]) || !std::isfinite(return_rate[m]) ||
          rental_rate[m] < 0.0 || return_rate[m] < 0.0) {
        throw ValidationError("poisson profile '" + station_id +
                              "': rates must be finite and non-negative (interval " +
                              std::to_string(m) + ")");
      }
    }
  }
};

using DemandProfile = std::variant<FiniteProfile, PoissonProfile>;

}  // namespace dockalloc

#endif  // DOCKALLOC_PROFILE_HPP_
