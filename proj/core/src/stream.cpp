#include "evkit/stream.hpp"

#include <algorithm>
#include <string>

#include "evkit/error.hpp"

namespace evkit {

EventStream::EventStream(SensorGeometry geometry) : geometry_(geometry) { geometry_.validate(); }

EventStream::EventStream(SensorGeometry geometry, std::vector<Event> events)
    : geometry_(geometry), events_(std::move(events)) {
  geometry_.validate();
  validate_canonical(geometry_, events_);
}

EventStream EventStream::canonicalize(SensorGeometry geometry, std::vector<Event> events) {
  std::sort(events.begin(), events.end(), canonical_less);
  return EventStream(geometry, std::move(events));
}

void validate_canonical(const SensorGeometry& geometry, std::span<const Event> events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!geometry.contains(e.x, e.y)) {
      throw Error(ErrorKind::out_of_bounds, "core",
                  "event " + std::to_string(i) + " at (" + std::to_string(e.x) + ", " +
                      std::to_string(e.y) + ") outside " + std::to_string(geometry.width) + "x" +
                      std::to_string(geometry.height));
    }
    if (e.t < 0) {
      throw Error(ErrorKind::field_range, "core", "event " + std::to_string(i) + " has t < 0");
    }
    if (e.p != Polarity::positive && e.p != Polarity::negative) {
      throw Error(ErrorKind::invalid_polarity, "core",
                  "event " + std::to_string(i) + " has zero polarity");
    }
    if (i > 0 && canonical_less(e, events[i - 1])) {
      throw Error(ErrorKind::ordering, "core",
                  "event " + std::to_string(i) + " precedes event " + std::to_string(i - 1) +
                      " in canonical order");
    }
  }
}

std::pair<std::size_t, std::size_t> window_bounds(std::span<const Event> events, Timestamp t0,
                                                  Timestamp t1) {
  auto by_time = [](const Event& e, Timestamp t) { return e.t < t; };
  auto first = std::lower_bound(events.begin(), events.end(), t0, by_time);
  auto last = std::lower_bound(first, events.end(), t1, by_time);
  return {static_cast<std::size_t>(first - events.begin()),
          static_cast<std::size_t>(last - events.begin())};
}

EventStream slice_stream(const EventStream& stream, Timestamp t0, Timestamp t1) {
  if (t0 > t1) {
    throw Error(ErrorKind::invalid_range, "core",
                "slice start " + std::to_string(t0) + " after end " + std::to_string(t1));
  }
  auto [first, last] = window_bounds(stream.events(), t0, t1);
  auto all = stream.events();
  return EventStream(stream.geometry(),
                     std::vector<Event>(all.begin() + static_cast<std::ptrdiff_t>(first),
                                        all.begin() + static_cast<std::ptrdiff_t>(last)));
}

}  // namespace evkit
