#ifndef DOCKALLOC_COST_ORACLE_HPP_
#define DOCKALLOC_COST_ORACLE_HPP_

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "error.hpp"
#include "profile.hpp"
#include "udf.hpp"

namespace dockalloc {

/// Per-station cost oracle. Rows c(C - b, b), b = 0..C, are computed on first access
/// and cached; a built row is immutable and shared.
class StationCost {
 public:
  using Row = std::vector<double>;
  using RowFn = std::function<Row(int capacity)>;

  StationCost(std::string id, int max_capacity, RowFn fn)
      : id_(std::move(id)), max_capacity_(max_capacity), fn_(std::move(fn)) {}

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] int max_capacity() const noexcept { return max_capacity_; }

  [[nodiscard]] std::shared_ptr<const Row> row(int capacity) const {
    if (capacity < 0) throw ValidationError("station '" + id_ + "': negative capacity");
    if (capacity > max_capacity_) throw CapacityLimitError(capacity, max_capacity_);
    std::lock_guard lock(mu_);
    auto it = rows_.find(capacity);
    if (it != rows_.end()) return it->second;
    auto built = std::make_shared<const Row>(fn_(capacity));
    if (built->size() != static_cast<std::size_t>(capacity) + 1) {
      throw ValidationError("station '" + id_ + "': row generator returned wrong length");
    }
    rows_.emplace(capacity, built);
    return built;
  }

  [[nodiscard]] double operator()(int open_docks, int bikes) const {
    if (open_docks < 0 || bikes < 0) {
      throw ValidationError("station '" + id_ + "': negative docks or bikes");
    }
    return (*row(open_docks + bikes))[bikes];
  }

  [[nodiscard]] CostTable table(int max_capacity) const {
    std::vector<std::vector<double>> rows;
    for (int s = 0; s <= max_capacity; ++s) rows.push_back(*row(s));
    return CostTable(id_, std::move(rows), provenance_);
  }

  /// Capacities whose rows have been materialised so far, ascending.
  [[nodiscard]] std::vector<int> computed_capacities() const {
    std::lock_guard lock(mu_);
    std::vector<int> out;
    out.reserve(rows_.size());
    for (const auto& [c, _] : rows_) out.push_back(c);
    return out;
  }

  void set_provenance(std::string p) { provenance_ = std::move(p); }

 private:
  std::string id_;
  int max_capacity_;
  RowFn fn_;
  std::string provenance_ = "finite";
  mutable std::mutex mu_;
  mutable std::map<int, std::shared_ptr<const Row>> rows_;
};

using StationCostPtr = std::shared_ptr<const StationCost>;

inline constexpr int kUnboundedCapacity = std::numeric_limits<int>::max() / 4;

inline StationCostPtr make_finite_cost(std::string id, FiniteProfile profile) {
  profile.validate();
  auto fn = [p = std::move(profile)](int capacity) {
    StationCost::Row row(static_cast<std::size_t>(capacity) + 1);
    for (int b = 0; b <= capacity; ++b) row[b] = expected_cost_finite(p, capacity - b, b);
    return row;
  };
  auto sc = std::make_shared<StationCost>(std::move(id), kUnboundedCapacity, std::move(fn));
  sc->set_provenance("finite");
  return sc;
}

inline StationCostPtr make_poisson_cost(std::shared_ptr<const PoissonStationModel> model) {
  const std::string id = model->profile().station_id;
  const int cap = model->capacity_cap();
  auto fn = [m = std::move(model)](int capacity) { return m->daily_row(capacity); };
  auto sc = std::make_shared<StationCost>(id, cap, std::move(fn));
  sc->set_provenance("poisson");
  return sc;
}

inline StationCostPtr make_table_cost(CostTable table) {
  const std::string id = table.station_id();
  const int cap = table.max_capacity();
  const std::string prov = table.provenance();
  auto fn = [t = std::move(table)](int capacity) { return t.rows()[capacity]; };
  auto sc = std::make_shared<StationCost>(id, cap, std::move(fn));
  sc->set_provenance(prov);
  return sc;
}

/// Identically zero cost; used for the internal depot and dock inventory.
inline StationCostPtr make_zero_cost(std::string id) {
  auto fn = [](int capacity) { return StationCost::Row(static_cast<std::size_t>(capacity) + 1, 0.0); };
  auto sc = std::make_shared<StationCost>(std::move(id), kUnboundedCapacity, std::move(fn));
  sc->set_provenance("zero");
  return sc;
}

}  // namespace dockalloc

#endif  // DOCKALLOC_COST_ORACLE_HPP_
