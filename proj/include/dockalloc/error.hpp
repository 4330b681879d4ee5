#ifndef DOCKALLOC_ERROR_HPP_
#define DOCKALLOC_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dockalloc {

/// Malformed or out-of-range input (records, profiles, tables, flags).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested capacity exceeds the configured hard cap for Poisson cost tables.
class CapacityLimitError : public std::runtime_error {
 public:
  CapacityLimitError(int requested, int cap)
      : std::runtime_error("capacity " + std::to_string(requested) + " exceeds hard cap " +
                           std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  [[nodiscard]] int requested() const noexcept { return requested_; }
  [[nodiscard]] int cap() const noexcept { return cap_; }

 private:
  int requested_;
  int cap_;
};

/// Budgets and bounds admit no allocation. Carries one line per violated condition.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(std::vector<std::string> reasons)
      : std::runtime_error(join(reasons)), reasons_(std::move(reasons)) {}

  [[nodiscard]] const std::vector<std::string>& reasons() const noexcept { return reasons_; }

 private:
  static std::string join(const std::vector<std::string>& reasons) {
    std::string out = "infeasible:";
    for (const auto& r : reasons) {
      out += " ";
      out += r;
      out += ";";
    }
    return out;
  }

  std::vector<std::string> reasons_;
};

}  // namespace dockalloc

#endif  // DOCKALLOC_ERROR_HPP_
