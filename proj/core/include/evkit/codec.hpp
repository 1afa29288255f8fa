#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evkit/stream.hpp"
#include "evkit/types.hpp"

namespace evkit {

enum class EventFormat { csv, evb };

std::string_view to_string(EventFormat format) noexcept;
/// Parses "csv" / "evb".
std::optional<EventFormat> parse_event_format(std::string_view name) noexcept;
/// Guesses the format from a file extension (.csv / .evb).
std::optional<EventFormat> format_from_path(std::string_view path) noexcept;

// EVB container, little-endian:
//   header (24 bytes): "EVB1" | u16 version | u16 width | u16 height | u64 count | 6 x 0
//   record (16 bytes): u64 t_us | u16 x | u16 y | i8 p | 3 x 0
inline constexpr std::array<std::uint8_t, 4> evb_magic{'E', 'V', 'B', '1'};
inline constexpr std::uint16_t evb_version = 1;
inline constexpr std::size_t evb_header_size = 24;
inline constexpr std::size_t evb_record_size = 16;

inline constexpr const char* event_csv_header = "t_us,x,y,p";
inline constexpr const char* annotation_csv_header = "t_us,x,y,w,h,class_id,class_confidence";
inline constexpr const char* detection_csv_header = "t_us,x,y,w,h,class_id,score";

struct EvbHeader {
  std::uint16_t version = evb_version;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint64_t count = 0;

  friend bool operator==(const EvbHeader&, const EvbHeader&) = default;
};

std::array<std::uint8_t, evb_header_size> encode_evb_header(const EvbHeader& header);
/// Throws truncated-header, bad-magic, bad-version, reserved-nonzero or
/// bad-header (zero dimension).
EvbHeader decode_evb_header(std::span<const std::uint8_t> bytes);

struct DecodeOptions {
  /// Strict rejects non-canonical order, out-of-bounds coordinates and
  /// nonzero reserved bytes. Lenient drops out-of-bounds events, sorts, and
  /// counts every deviation as a warning.
  bool strict = true;
  /// CSV carries no geometry; this one is attached to decoded streams.
  SensorGeometry csv_geometry{};
  /// Records buffered per read from the underlying stream.
  std::size_t chunk_records = 4096;
};

struct DecodeResult {
  EventStream stream;
  std::size_t warnings = 0;
};

/// Pull-based decoder holding one fixed-size chunk in memory regardless of
/// input length.
class EventReader {
 public:
  EventReader(std::istream& in, EventFormat format, DecodeOptions options = {});
  ~EventReader();
  EventReader(const EventReader&) = delete;
  EventReader& operator=(const EventReader&) = delete;

  EventFormat format() const noexcept { return format_; }
  const SensorGeometry& geometry() const noexcept { return geometry_; }
  /// EVB header count; empty for CSV.
  std::optional<std::uint64_t> declared_count() const noexcept { return declared_; }
  std::size_t warnings() const noexcept { return warnings_; }

  /// Fills `out` with the next events. Returns 0 only once the input is
  /// exhausted and its trailer has been checked.
  std::size_t read(std::span<Event> out);

 private:
  std::size_t read_evb(std::span<Event> out);
  std::size_t read_csv(std::span<Event> out);
  bool accept(Event& e, std::size_t position);
  void check_evb_trailer();

  std::istream& in_;
  EventFormat format_;
  DecodeOptions options_;
  SensorGeometry geometry_{};
  std::optional<std::uint64_t> declared_;
  std::uint64_t consumed_ = 0;
  std::size_t warnings_ = 0;
  bool done_ = false;
  std::optional<Event> last_;
  std::vector<std::uint8_t> chunk_;
  struct Lines;
  std::unique_ptr<Lines> lines_;
};

/// Push-based encoder; buffers one chunk. EVB needs the record count up
/// front because it is written in the header.
class EventWriter {
 public:
  EventWriter(std::ostream& out, EventFormat format, SensorGeometry geometry, std::uint64_t count,
              std::size_t chunk_records = 4096);

  void write(std::span<const Event> events);
  /// Flushes and, for EVB, checks that exactly `count` events were written.
  void finish();

 private:
  void flush();

  std::ostream& out_;
  EventFormat format_;
  SensorGeometry geometry_;
  std::uint64_t count_;
  std::uint64_t written_ = 0;
  std::size_t chunk_records_;
  std::string buffer_;
  bool finished_ = false;
};

std::vector<std::uint8_t> encode_events(const EventStream& stream, EventFormat format);
void write_events(std::ostream& out, const EventStream& stream, EventFormat format);

DecodeResult decode_events(std::span<const std::uint8_t> bytes, EventFormat format,
                           const DecodeOptions& options = {});
DecodeResult read_events(std::istream& in, EventFormat format, const DecodeOptions& options = {});

/// 1MPX annotation CSV; confidence printed with six decimals.
std::string encode_annotations(std::span<const Annotation> rows);
std::vector<Annotation> decode_annotations(std::string_view text,
                                           const ClassTable& classes = ClassTable::traffic());

std::string encode_detections(std::span<const Detection> rows);
std::vector<Detection> decode_detections(std::string_view text,
                                         const ClassTable& classes = ClassTable::traffic());

/// Divides x, w by width and y, h by height.
std::vector<Annotation> normalize_boxes(std::span<const Annotation> rows,
                                        const SensorGeometry& geometry);

}  // namespace evkit
