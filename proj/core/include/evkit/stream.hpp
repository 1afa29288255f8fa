#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evkit/types.hpp"

namespace evkit {

/// Time-ordered events attached to a sensor geometry. Immutable after
/// construction; every instance is canonical and in bounds.
class EventStream {
 public:
  EventStream() = default;
  explicit EventStream(SensorGeometry geometry);
  /// Validates canonical order and bounds; throws ordering / out-of-bounds.
  EventStream(SensorGeometry geometry, std::vector<Event> events);

  /// Sorts into canonical order, then validates bounds.
  static EventStream canonicalize(SensorGeometry geometry, std::vector<Event> events);

  const SensorGeometry& geometry() const noexcept { return geometry_; }
  std::span<const Event> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  auto begin() const noexcept { return events_.begin(); }
  auto end() const noexcept { return events_.end(); }

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  SensorGeometry geometry_{};
  std::vector<Event> events_;
};

/// Throws ordering on the first decreasing pair and out-of-bounds on the
/// first event outside `geometry`.
void validate_canonical(const SensorGeometry& geometry, std::span<const Event> events);

/// Events with t0 <= t < t1, same geometry. Throws invalid-range if t0 > t1.
EventStream slice_stream(const EventStream& stream, Timestamp t0, Timestamp t1);

/// Half-open index range [first, last) of events with t0 <= t < t1.
std::pair<std::size_t, std::size_t> window_bounds(std::span<const Event> events, Timestamp t0,
                                                  Timestamp t1);

}  // namespace evkit
