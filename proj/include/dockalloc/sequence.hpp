#ifndef DOCKALLOC_SEQUENCE_HPP_
#define DOCKALLOC_SEQUENCE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace dockalloc {

/// One customer arriving at a station: a rental attempt (-1) or a return attempt (+1).
enum class Customer : std::int8_t { Rental = -1, Return = 1 };

using ArrivalSequence = std::vector<Customer>;

/// Station state along a trajectory. open_docks + bikes is conserved.
struct SequenceState {
  int open_docks = 0;
  int bikes = 0;
  int stockouts = 0;

  friend bool operator==(const SequenceState&, const SequenceState&) = default;
};

/// Advances the state by one customer. Returns true iff the customer is turned away.
inline bool step(SequenceState& s, Customer x) noexcept {
  if (x == Customer::Return) {
    if (s.open_docks == 0) {
      ++s.stockouts;
      return true;
    }
    --s.open_docks;
    ++s.bikes;
  } else {
    if (s.bikes == 0) {
      ++s.stockouts;
      return true;
    }
    --s.bikes;
    ++s.open_docks;
  }
  return false;
}

struct StockoutCount {
  int stockouts = 0;
  SequenceState final_state;
};

/// Number of out-of-stock events when the sequence hits a station that opens with
/// `open_docks` empty docks and `bikes` bikes, plus the state after the last customer.
inline StockoutCount count_stockouts(std::span<const Customer> sequence, int open_docks,
                                     int bikes) {
  if (open_docks < 0 || bikes < 0) {
    throw ValidationError("count_stockouts: negative docks or bikes");
  }
  SequenceState s{open_docks, bikes, 0};
  for (Customer x : sequence) step(s, x);
  return {s.stockouts, s};
}

/// Like count_stockouts, but customers flagged in `exempt` never count as stockouts.
/// An exempt customer that would be turned away leaves the state unchanged.
inline StockoutCount count_stockouts_masked(std::span<const Customer> sequence,
                                            std::span<const bool> exempt, int open_docks,
                                            int bikes) {
  if (exempt.size() != sequence.size()) {
    throw ValidationError("count_stockouts_masked: mask length differs from sequence length");
  }
  if (open_docks < 0 || bikes < 0) {
    throw ValidationError("count_stockouts_masked: negative docks or bikes");
  }
  SequenceState s{open_docks, bikes, 0};
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const int before = s.stockouts;
    step(s, sequence[t]);
    if (exempt[t]) s.stockouts = before;
  }
  return {s.stockouts, s};
}

inline int sign(Customer x) noexcept { return static_cast<int>(x); }

inline Customer customer_from_sign(int v) {
  if (v == 1) return Customer::Return;
  if (v == -1) return Customer::Rental;
  throw ValidationError("arrival entries must be +1 or -1, got " + std::to_string(v));
}

}  // namespace dockalloc

#endif  // DOCKALLOC_SEQUENCE_HPP_
