#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "evkit/stream.hpp"
#include "evkit/types.hpp"

namespace evkit {

/// One actor observed at one simulator tick, already projected to the image
/// plane.
struct TickRecord {
  Timestamp tick_t = 0;
  std::int64_t actor_id = 0;
  int class_id = 0;
  Box box{};
  double speed_mps = 0.0;
  double distance_m = 0.0;

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

struct FrameIndex {
  Timestamp start_t = 0;
  Timestamp delta_t = 1;
};

struct FrameGroup {
  Timestamp start_t = 0;
  std::vector<Event> events;
};

struct GroupedEvents {
  std::vector<FrameGroup> groups;
  std::vector<Event> unassigned;
};

/// Keeps records moving strictly faster than `min_speed_mps` and within
/// `radius_m` (inclusive) of the sensor. Order is preserved.
std::vector<TickRecord> filter_tick_records(std::span<const TickRecord> records,
                                            double min_speed_mps, double radius_m);

/// Output grid spacing in microseconds: round(1e6 / rate_hz).
Timestamp output_period_us(double rate_hz);

/// Resamples per-tick boxes onto the output grid (multiples of the output
/// period). Each grid tick T takes, per actor, the latest record with
/// tick_t <= T provided T - tick_t is less than one source tick. Output is
/// sorted by (t, actor_id); confidences are 1.0.
std::vector<Annotation> resample_annotations(std::span<const TickRecord> records, double rate_hz);

/// Buckets events into half-open intervals [start_t, start_t + delta_t).
GroupedEvents group_events_by_frame(const EventStream& stream, std::span<const FrameIndex> frames);

/// Tick-log CSV: tick_t_us,actor_id,class_id,x,y,w,h,speed_mps,distance_m
inline constexpr const char* tick_log_header = "tick_t_us,actor_id,class_id,x,y,w,h,speed_mps,distance_m";

std::vector<TickRecord> read_tick_log(std::istream& in);
void write_tick_log(std::ostream& out, std::span<const TickRecord> records);

}  // namespace evkit
