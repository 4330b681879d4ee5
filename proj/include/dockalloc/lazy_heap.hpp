#ifndef DOCKALLOC_LAZY_HEAP_HPP_
#define DOCKALLOC_LAZY_HEAP_HPP_

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

namespace dockalloc::detail {

/// Min-heap of (value, station) pairs with lazy deletion: an entry is live only while
/// its version stamp matches the station's current version.
class LazyHeap {
 public:
  struct Entry {
    double value;
    int station;
    std::uint64_t version;
  };

  void push(double value, int station, std::uint64_t version) {
    heap_.push({value, station, version});
  }

  void clear() { heap_ = {}; }

  /// Up to k live entries with the smallest (value, station), ascending. Stale
  /// entries met on the way are dropped for good.
  std::vector<Entry> top(std::size_t k, std::span<const std::uint64_t> versions) {
    std::vector<Entry> out;
    out.reserve(k);
    while (out.size() < k && !heap_.empty()) {
      Entry e = heap_.top();
      heap_.pop();
      if (versions[e.station] != e.version) continue;
      out.push_back(e);
    }
    for (const auto& e : out) heap_.push(e);
    return out;
  }

  [[nodiscard]] std::size_t raw_size() const noexcept { return heap_.size(); }

 private:
  struct Greater {
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      if (a.value != b.value) return a.value > b.value;
      return a.station > b.station;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Greater> heap_;
};

}  // namespace dockalloc::detail

#endif  // DOCKALLOC_LAZY_HEAP_HPP_
