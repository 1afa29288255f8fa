#include "evkit/sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "csv.hpp"
#include "evkit/error.hpp"

namespace evkit {

std::vector<TickRecord> filter_tick_records(std::span<const TickRecord> records,
                                            double min_speed_mps, double radius_m) {
  if (!(min_speed_mps >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "sync", "min_speed must be >= 0");
  }
  if (!(radius_m > 0.0)) throw Error(ErrorKind::invalid_argument, "sync", "radius must be > 0");
  std::vector<TickRecord> kept;
  for (const auto& r : records) {
    if (r.speed_mps > min_speed_mps && r.distance_m <= radius_m) kept.push_back(r);
  }
  return kept;
}

Timestamp output_period_us(double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw Error(ErrorKind::invalid_argument, "sync", "rate_hz must be positive");
  }
  const auto period = static_cast<Timestamp>(std::llround(1e6 / rate_hz));
  if (period < 1) throw Error(ErrorKind::invalid_argument, "sync", "rate_hz above 1 MHz");
  return period;
}

std::vector<Annotation> resample_annotations(std::span<const TickRecord> records, double rate_hz) {
  const Timestamp period = output_period_us(rate_hz);
  if (records.empty()) return {};

  Timestamp source_period = std::numeric_limits<Timestamp>::max();
  for (std::size_t i = 1; i < records.size(); ++i) {
    const Timestamp gap = records[i].tick_t - records[i - 1].tick_t;
    if (gap < 0) {
      throw Error(ErrorKind::ordering, "sync",
                  "tick records not sorted at index " + std::to_string(i));
    }
    if (gap > 0) source_period = std::min(source_period, gap);
  }
  if (source_period == std::numeric_limits<Timestamp>::max()) source_period = period;

  // Per actor, records in tick order (input order is already sorted).
  std::map<std::int64_t, std::vector<const TickRecord*>> by_actor;
  for (const auto& r : records) by_actor[r.actor_id].push_back(&r);

  struct Keyed {
    Timestamp t;
    std::int64_t actor;
    Annotation a;
  };
  std::vector<Keyed> out;
  for (const auto& [actor, list] : by_actor) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const TickRecord& r = *list[i];
      // Same-tick duplicates: the later row wins.
      if (i + 1 < list.size() && list[i + 1]->tick_t == r.tick_t) continue;
      Timestamp until = r.tick_t + source_period;  // exclusive
      if (i + 1 < list.size()) until = std::min(until, list[i + 1]->tick_t);
      // first multiple of period >= r.tick_t
      Timestamp t = (r.tick_t / period) * period;
      if (t < r.tick_t) t += period;
      for (; t < until; t += period) {
        out.push_back({t, actor, Annotation{t, r.box, r.class_id, 1.0}});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Keyed& a, const Keyed& b) {
    return a.t != b.t ? a.t < b.t : a.actor < b.actor;
  });
  std::vector<Annotation> result;
  result.reserve(out.size());
  for (auto& k : out) result.push_back(k.a);
  return result;
}

GroupedEvents group_events_by_frame(const EventStream& stream, std::span<const FrameIndex> frames) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].delta_t <= 0) {
      throw Error(ErrorKind::invalid_index, "sync",
                  "frame " + std::to_string(i) + " has non-positive delta_t");
    }
    if (i > 0 && frames[i].start_t < frames[i - 1].start_t + frames[i - 1].delta_t) {
      throw Error(ErrorKind::invalid_index, "sync",
                  "frame " + std::to_string(i) + " overlaps or precedes frame " +
                      std::to_string(i - 1));
    }
  }
  GroupedEvents result;
  result.groups.reserve(frames.size());
  for (const auto& f : frames) result.groups.push_back(FrameGroup{f.start_t, {}});

  // Events and intervals are both sorted; walk them together.
  std::size_t g = 0;
  for (const Event& e : stream) {
    while (g < frames.size() && e.t >= frames[g].start_t + frames[g].delta_t) ++g;
    if (g < frames.size() && e.t >= frames[g].start_t) {
      result.groups[g].events.push_back(e);
    } else {
      result.unassigned.push_back(e);
    }
  }
  return result;
}

std::vector<TickRecord> read_tick_log(std::istream& in) {
  detail::LineReader reader(in, "sync");
  std::string_view line;
  if (!reader.next(line)) return {};
  if (line != tick_log_header) {
    detail::row_error(ErrorKind::unparsable, "sync", 1,
                      "expected header '" + std::string(tick_log_header) + "'");
  }
  std::vector<TickRecord> records;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const std::size_t row = reader.row();
    auto f = detail::split_fields(line);
    if (f.size() != 9) {
      detail::row_error(ErrorKind::column_count, "sync", row,
                        "expected 9 fields, got " + std::to_string(f.size()));
    }
    TickRecord r;
    r.tick_t = detail::parse_int<Timestamp>(f[0], "sync", row, "tick_t_us");
    r.actor_id = detail::parse_int<std::int64_t>(f[1], "sync", row, "actor_id");
    r.class_id = detail::parse_int<int>(f[2], "sync", row, "class_id");
    r.box.x = detail::parse_double(f[3], "sync", row, "x");
    r.box.y = detail::parse_double(f[4], "sync", row, "y");
    r.box.w = detail::parse_double(f[5], "sync", row, "w");
    r.box.h = detail::parse_double(f[6], "sync", row, "h");
    r.speed_mps = detail::parse_double(f[7], "sync", row, "speed_mps");
    r.distance_m = detail::parse_double(f[8], "sync", row, "distance_m");
    if (r.tick_t < 0) detail::row_error(ErrorKind::field_range, "sync", row, "tick_t_us < 0");
    if (!(r.speed_mps >= 0.0)) detail::row_error(ErrorKind::field_range, "sync", row, "speed < 0");
    if (!(r.distance_m >= 0.0)) {
      detail::row_error(ErrorKind::field_range, "sync", row, "distance < 0");
    }
    if (!(r.box.w > 0.0) || !(r.box.h > 0.0)) {
      detail::row_error(ErrorKind::field_range, "sync", row, "box width/height must be > 0");
    }
    records.push_back(r);
  }
  return records;
}

void write_tick_log(std::ostream& out, std::span<const TickRecord> records) {
  std::string buf = std::string(tick_log_header) + "\n";
  for (const auto& r : records) {
    detail::append_int(buf, r.tick_t);
    buf += ',';
    detail::append_int(buf, r.actor_id);
    buf += ',';
    detail::append_int(buf, r.class_id);
    for (double v : {r.box.x, r.box.y, r.box.w, r.box.h, r.speed_mps, r.distance_m}) {
      buf += ',';
      detail::append_double(buf, v);
    }
    buf += '\n';
  }
  out << buf;
}

}  // namespace evkit
