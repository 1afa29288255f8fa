#include "evkit/codec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <streambuf>
#include <string>

#include "csv.hpp"
#include "evkit/error.hpp"

namespace evkit {

namespace {

constexpr const char* kModule = "codec";

void put_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

/// Read-only streambuf over a byte span so in-memory decoding shares the
/// streaming path.
class SpanBuf : public std::streambuf {
 public:
  explicit SpanBuf(std::span<const std::uint8_t> bytes) {
    char* p = const_cast<char*>(reinterpret_cast<const char*>(bytes.data()));
    setg(p, p, p + bytes.size());
  }
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, kModule, what);
}

}  // namespace

std::string_view to_string(EventFormat format) noexcept {
  return format == EventFormat::csv ? "csv" : "evb";
}

std::optional<EventFormat> parse_event_format(std::string_view name) noexcept {
  if (name == "csv") return EventFormat::csv;
  if (name == "evb") return EventFormat::evb;
  return std::nullopt;
}

std::optional<EventFormat> format_from_path(std::string_view path) noexcept {
  auto ends_with = [&](std::string_view s) {
    if (path.size() < s.size()) return false;
    const auto tail = path.substr(path.size() - s.size());
    return std::equal(tail.begin(), tail.end(), s.begin(), [](char a, char b) {
      return std::tolower(static_cast<unsigned char>(a)) == b;
    });
  };
  if (ends_with(".csv")) return EventFormat::csv;
  if (ends_with(".evb")) return EventFormat::evb;
  return std::nullopt;
}

std::array<std::uint8_t, evb_header_size> encode_evb_header(const EvbHeader& header) {
  std::array<std::uint8_t, evb_header_size> out{};
  std::copy(evb_magic.begin(), evb_magic.end(), out.begin());
  put_u16(out.data() + 4, header.version);
  put_u16(out.data() + 6, header.width);
  put_u16(out.data() + 8, header.height);
  put_u64(out.data() + 10, header.count);
  return out;
}

EvbHeader decode_evb_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < evb_header_size) {
    fail(ErrorKind::truncated_header,
         "header needs 24 bytes, got " + std::to_string(bytes.size()));
  }
  if (!std::equal(evb_magic.begin(), evb_magic.end(), bytes.begin())) {
    fail(ErrorKind::bad_magic, "expected magic 'EVB1'");
  }
  EvbHeader h;
  h.version = get_u16(bytes.data() + 4);
  h.width = get_u16(bytes.data() + 6);
  h.height = get_u16(bytes.data() + 8);
  h.count = get_u64(bytes.data() + 10);
  if (h.version != evb_version) {
    fail(ErrorKind::bad_version, "unsupported version " + std::to_string(h.version));
  }
  for (std::size_t i = 18; i < evb_header_size; ++i) {
    if (bytes[i] != 0) fail(ErrorKind::reserved_nonzero, "header reserved bytes must be zero");
  }
  if (h.width == 0 || h.height == 0) fail(ErrorKind::bad_header, "zero sensor dimension");
  return h;
}

// ---------------------------------------------------------------------------
// EventReader

struct EventReader::Lines {
  explicit Lines(std::istream& in) : reader(in, kModule, 256) {}
  detail::LineReader reader;
};

EventReader::EventReader(std::istream& in, EventFormat format, DecodeOptions options)
    : in_(in), format_(format), options_(options) {
  options_.chunk_records = std::max<std::size_t>(options_.chunk_records, 1);
  if (format_ == EventFormat::evb) {
    std::array<std::uint8_t, evb_header_size> header{};
    in_.read(reinterpret_cast<char*>(header.data()), evb_header_size);
    const auto got = static_cast<std::size_t>(in_.gcount());
    const EvbHeader h = decode_evb_header(std::span(header.data(), got));
    geometry_ = SensorGeometry{h.width, h.height};
    declared_ = h.count;
    chunk_.resize(options_.chunk_records * evb_record_size);
  } else {
    options_.csv_geometry.validate();
    geometry_ = options_.csv_geometry;
    lines_ = std::make_unique<Lines>(in_);
    std::string_view line;
    if (!lines_->reader.next(line)) fail(ErrorKind::bad_header, "missing CSV header");
    if (line != event_csv_header) {
      fail(ErrorKind::bad_header, std::string("expected header '") + event_csv_header + "'");
    }
  }
}

EventReader::~EventReader() = default;

bool EventReader::accept(Event& e, std::size_t position) {
  if (!geometry_.contains(e.x, e.y)) {
    if (options_.strict) {
      fail(ErrorKind::out_of_bounds, "event " + std::to_string(position) + " at (" +
                                         std::to_string(e.x) + ", " + std::to_string(e.y) +
                                         ") outside sensor");
    }
    ++warnings_;
    return false;
  }
  if (last_ && canonical_less(e, *last_)) {
    if (options_.strict) {
      fail(ErrorKind::ordering,
           "event " + std::to_string(position) + " is out of canonical order");
    }
    ++warnings_;
  }
  last_ = e;
  return true;
}

std::size_t EventReader::read(std::span<Event> out) {
  if (done_ || out.empty()) return 0;
  return format_ == EventFormat::evb ? read_evb(out) : read_csv(out);
}

void EventReader::check_evb_trailer() {
  std::uint64_t extra = 0;
  while (in_) {
    in_.read(reinterpret_cast<char*>(chunk_.data()), static_cast<std::streamsize>(chunk_.size()));
    extra += static_cast<std::uint64_t>(in_.gcount());
  }
  if (extra == 0) return;
  if (extra % evb_record_size != 0) {
    fail(ErrorKind::truncated_record, "trailing partial record of " +
                                          std::to_string(extra % evb_record_size) + " bytes");
  }
  fail(ErrorKind::count_mismatch, "header declares " + std::to_string(*declared_) +
                                      " records, found " +
                                      std::to_string(*declared_ + extra / evb_record_size));
}

std::size_t EventReader::read_evb(std::span<Event> out) {
  std::size_t filled = 0;
  while (filled < out.size()) {
    const std::uint64_t remaining = *declared_ - consumed_;
    if (remaining == 0) {
      check_evb_trailer();
      done_ = true;
      break;
    }
    const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(
        {remaining, out.size() - filled, options_.chunk_records}));
    in_.read(reinterpret_cast<char*>(chunk_.data()),
             static_cast<std::streamsize>(want * evb_record_size));
    const auto got = static_cast<std::size_t>(in_.gcount());
    const std::size_t whole = got / evb_record_size;

    for (std::size_t i = 0; i < whole; ++i) {
      const std::uint8_t* rec = chunk_.data() + i * evb_record_size;
      const std::uint64_t position = consumed_ + i;
      const std::uint64_t t = get_u64(rec);
      const auto p = static_cast<std::int8_t>(rec[12]);
      if (p != 1 && p != -1) {
        fail(ErrorKind::invalid_polarity, "record " + std::to_string(position) +
                                              " has polarity " + std::to_string(int{p}));
      }
      if (t > static_cast<std::uint64_t>(std::numeric_limits<Timestamp>::max())) {
        fail(ErrorKind::field_range, "record " + std::to_string(position) +
                                         " timestamp exceeds signed 64-bit range");
      }
      if ((rec[13] | rec[14] | rec[15]) != 0) {
        if (options_.strict) {
          fail(ErrorKind::reserved_nonzero,
               "record " + std::to_string(position) + " reserved bytes must be zero");
        }
        ++warnings_;
      }
      Event e{get_u16(rec + 8), get_u16(rec + 10), static_cast<Timestamp>(t),
              p > 0 ? Polarity::positive : Polarity::negative};
      if (accept(e, position)) out[filled++] = e;
    }
    consumed_ += whole;

    if (got < want * evb_record_size) {
      if (got % evb_record_size != 0) {
        fail(ErrorKind::truncated_record,
             "record " + std::to_string(consumed_) + " is truncated");
      }
      fail(ErrorKind::count_mismatch, "header declares " + std::to_string(*declared_) +
                                          " records, found " + std::to_string(consumed_));
    }
  }
  return filled;
}

std::size_t EventReader::read_csv(std::span<Event> out) {
  std::size_t filled = 0;
  std::string_view line;
  while (filled < out.size()) {
    if (!lines_->reader.next(line)) {
      done_ = true;
      break;
    }
    if (line.empty()) continue;
    const std::size_t row = lines_->reader.row();
    auto f = detail::split_fields(line);
    if (f.size() != 4) {
      detail::row_error(ErrorKind::column_count, kModule, row,
                        "expected 4 fields, got " + std::to_string(f.size()));
    }
    const auto t = detail::parse_int<Timestamp>(f[0], kModule, row, "t_us");
    const auto x = detail::parse_int<std::int64_t>(f[1], kModule, row, "x");
    const auto y = detail::parse_int<std::int64_t>(f[2], kModule, row, "y");
    const auto p = detail::parse_int<int>(f[3], kModule, row, "p");
    if (p != 1 && p != -1) {
      detail::row_error(ErrorKind::invalid_polarity, kModule, row,
                        "polarity must be 1 or -1, got " + std::to_string(p));
    }
    if (t < 0) detail::row_error(ErrorKind::field_range, kModule, row, "t_us < 0");
    if (!geometry_.contains(x, y)) {
      if (options_.strict) {
        detail::row_error(ErrorKind::out_of_bounds, kModule, row,
                          "(" + std::to_string(x) + ", " + std::to_string(y) + ") outside sensor");
      }
      ++warnings_;
      ++consumed_;
      continue;
    }
    Event e{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y), t,
            p > 0 ? Polarity::positive : Polarity::negative};
    if (last_ && canonical_less(e, *last_)) {
      if (options_.strict) {
        detail::row_error(ErrorKind::ordering, kModule, row, "out of canonical order");
      }
      ++warnings_;
    }
    last_ = e;
    out[filled++] = e;
    ++consumed_;
  }
  return filled;
}

// ---------------------------------------------------------------------------
// EventWriter

EventWriter::EventWriter(std::ostream& out, EventFormat format, SensorGeometry geometry,
                         std::uint64_t count, std::size_t chunk_records)
    : out_(out),
      format_(format),
      geometry_(geometry),
      count_(count),
      chunk_records_(std::max<std::size_t>(chunk_records, 1)) {
  geometry_.validate();
  if (format_ == EventFormat::evb) {
    if (geometry_.width > 0xFFFF || geometry_.height > 0xFFFF) {
      fail(ErrorKind::encode, "sensor geometry exceeds 16-bit EVB range");
    }
    const auto header = encode_evb_header(
        EvbHeader{evb_version, static_cast<std::uint16_t>(geometry_.width),
                  static_cast<std::uint16_t>(geometry_.height), count_});
    out_.write(reinterpret_cast<const char*>(header.data()), header.size());
    buffer_.reserve(chunk_records_ * evb_record_size);
  } else {
    out_ << event_csv_header << '\n';
    buffer_.reserve(chunk_records_ * 32);
  }
}

void EventWriter::write(std::span<const Event> events) {
  for (const Event& e : events) {
    if (format_ == EventFormat::evb) {
      if (written_ == count_) fail(ErrorKind::encode, "more events than declared count");
      if (e.x < 0 || e.y < 0 || e.x > 0xFFFF || e.y > 0xFFFF) {
        fail(ErrorKind::encode, "coordinates exceed 16-bit EVB range");
      }
      if (e.t < 0) fail(ErrorKind::encode, "negative timestamp");
      std::uint8_t rec[evb_record_size]{};
      put_u64(rec, static_cast<std::uint64_t>(e.t));
      put_u16(rec + 8, static_cast<std::uint16_t>(e.x));
      put_u16(rec + 10, static_cast<std::uint16_t>(e.y));
      rec[12] = static_cast<std::uint8_t>(static_cast<std::int8_t>(sign(e.p)));
      buffer_.append(reinterpret_cast<const char*>(rec), evb_record_size);
    } else {
      detail::append_int(buffer_, e.t);
      buffer_ += ',';
      detail::append_int(buffer_, e.x);
      buffer_ += ',';
      detail::append_int(buffer_, e.y);
      buffer_ += e.p == Polarity::positive ? ",1\n" : ",-1\n";
    }
    ++written_;
    if (buffer_.size() >= chunk_records_ * evb_record_size) flush();
  }
}

void EventWriter::flush() {
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  if (!out_) throw Error(ErrorKind::io, kModule, "write failure");
}

void EventWriter::finish() {
  if (finished_) return;
  flush();
  finished_ = true;
  if (format_ == EventFormat::evb && written_ != count_) {
    fail(ErrorKind::encode, "declared " + std::to_string(count_) + " events, wrote " +
                                std::to_string(written_));
  }
  out_.flush();
}

void write_events(std::ostream& out, const EventStream& stream, EventFormat format) {
  EventWriter writer(out, format, stream.geometry(), stream.size());
  writer.write(stream.events());
  writer.finish();
}

std::vector<std::uint8_t> encode_events(const EventStream& stream, EventFormat format) {
  std::ostringstream out(std::ios::binary);
  write_events(out, stream, format);
  const std::string s = std::move(out).str();
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

DecodeResult read_events(std::istream& in, EventFormat format, const DecodeOptions& options) {
  EventReader reader(in, format, options);
  std::vector<Event> events;
  if (reader.declared_count()) {
    events.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(*reader.declared_count(),
                                                                    std::uint64_t{1} << 20)));
  }
  std::vector<Event> chunk(std::max<std::size_t>(options.chunk_records, 1));
  while (const std::size_t n = reader.read(chunk)) {
    events.insert(events.end(), chunk.begin(), chunk.begin() + static_cast<std::ptrdiff_t>(n));
  }
  DecodeResult result;
  result.warnings = reader.warnings();
  result.stream = options.strict ? EventStream(reader.geometry(), std::move(events))
                                 : EventStream::canonicalize(reader.geometry(), std::move(events));
  return result;
}

DecodeResult decode_events(std::span<const std::uint8_t> bytes, EventFormat format,
                           const DecodeOptions& options) {
  SpanBuf buf(bytes);
  std::istream in(&buf);
  DecodeOptions opts = options;
  if (format == EventFormat::evb && bytes.size() >= evb_header_size) {
    // Whole input is resident; read it in as few passes as possible.
    opts.chunk_records =
        std::max<std::size_t>(opts.chunk_records,
                              std::min<std::size_t>((bytes.size() - evb_header_size) /
                                                        evb_record_size + 1,
                                                    std::size_t{1} << 16));
  }
  return read_events(in, format, opts);
}

// ---------------------------------------------------------------------------
// Annotation / detection CSV

namespace {

template <class Row>
struct BoxCsv;

template <>
struct BoxCsv<Annotation> {
  static constexpr const char* header = annotation_csv_header;
  static constexpr const char* last_name = "class_confidence";
  static double& last(Annotation& a) { return a.class_confidence; }
  static double last(const Annotation& a) { return a.class_confidence; }
  static void append_last(std::string& out, double v) { detail::append_fixed(out, v, 6); }
};

template <>
struct BoxCsv<Detection> {
  static constexpr const char* header = detection_csv_header;
  static constexpr const char* last_name = "score";
  static double& last(Detection& d) { return d.score; }
  static double last(const Detection& d) { return d.score; }
  static void append_last(std::string& out, double v) { detail::append_double(out, v); }
};

template <class Row>
std::string encode_boxes(std::span<const Row> rows) {
  using Csv = BoxCsv<Row>;
  std::string out = std::string(Csv::header) + "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (!(r.box.w > 0.0) || !(r.box.h > 0.0)) {
      fail(ErrorKind::encode, "row " + std::to_string(i) + " has non-positive width or height");
    }
    if (i > 0 && r.t < rows[i - 1].t) {
      fail(ErrorKind::encode, "row " + std::to_string(i) + " is not sorted by timestamp");
    }
    const double last = Csv::last(r);
    if (!(last >= 0.0 && last <= 1.0)) {
      fail(ErrorKind::encode, std::string("row ") + std::to_string(i) + " " + Csv::last_name +
                                  " outside [0, 1]");
    }
    detail::append_int(out, r.t);
    for (double v : {r.box.x, r.box.y, r.box.w, r.box.h}) {
      out += ',';
      detail::append_double(out, v);
    }
    out += ',';
    detail::append_int(out, r.class_id);
    out += ',';
    Csv::append_last(out, last);
    out += '\n';
  }
  return out;
}

template <class Row>
std::vector<Row> decode_boxes(std::string_view text, const ClassTable& classes) {
  using Csv = BoxCsv<Row>;
  std::vector<Row> rows;
  if (text.empty()) return rows;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = detail::strip_cr(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++row;
    if (row == 1) {
      if (line != Csv::header) {
        detail::row_error(ErrorKind::unparsable, kModule, 1,
                          std::string("expected header '") + Csv::header + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    auto f = detail::split_fields(line);
    if (f.size() != 7) {
      detail::row_error(ErrorKind::column_count, kModule, row,
                        "expected 7 fields, got " + std::to_string(f.size()));
    }
    Row r;
    r.t = detail::parse_int<Timestamp>(f[0], kModule, row, "t_us");
    r.box.x = detail::parse_double(f[1], kModule, row, "x");
    r.box.y = detail::parse_double(f[2], kModule, row, "y");
    r.box.w = detail::parse_double(f[3], kModule, row, "w");
    r.box.h = detail::parse_double(f[4], kModule, row, "h");
    r.class_id = detail::parse_int<int>(f[5], kModule, row, "class_id");
    Csv::last(r) = detail::parse_double(f[6], kModule, row, Csv::last_name);
    if (!(Csv::last(r) >= 0.0 && Csv::last(r) <= 1.0)) {
      detail::row_error(ErrorKind::field_range, kModule, row,
                        std::string(Csv::last_name) + " outside [0, 1]");
    }
    if (r.t < 0) detail::row_error(ErrorKind::field_range, kModule, row, "t_us < 0");
    if (!(r.box.w > 0.0) || !(r.box.h > 0.0) || !std::isfinite(r.box.x) ||
        !std::isfinite(r.box.y) || !std::isfinite(r.box.w) || !std::isfinite(r.box.h)) {
      detail::row_error(ErrorKind::field_range, kModule, row, "invalid box geometry");
    }
    if (!classes.contains(r.class_id)) {
      detail::row_error(ErrorKind::field_range, kModule, row,
                        "undeclared class_id " + std::to_string(r.class_id));
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

std::string encode_annotations(std::span<const Annotation> rows) {
  return encode_boxes<Annotation>(rows);
}

std::vector<Annotation> decode_annotations(std::string_view text, const ClassTable& classes) {
  return decode_boxes<Annotation>(text, classes);
}

std::string encode_detections(std::span<const Detection> rows) {
  return encode_boxes<Detection>(rows);
}

std::vector<Detection> decode_detections(std::string_view text, const ClassTable& classes) {
  return decode_boxes<Detection>(text, classes);
}

std::vector<Annotation> normalize_boxes(std::span<const Annotation> rows,
                                        const SensorGeometry& geometry) {
  geometry.validate();
  std::vector<Annotation> out(rows.begin(), rows.end());
  const double w = geometry.width;
  const double h = geometry.height;
  for (auto& a : out) a.box = Box{a.box.x / w, a.box.y / h, a.box.w / w, a.box.h / h};
  return out;
}

}  // namespace evkit
