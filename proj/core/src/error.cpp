#include "evkit/error.hpp"

namespace evkit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_range: return "invalid-range";
    case ErrorKind::non_monotonic_frames: return "non-monotonic-frames";
    case ErrorKind::geometry_mismatch: return "geometry-mismatch";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::ordering: return "ordering";
    case ErrorKind::out_of_bounds: return "out-of-bounds";
    case ErrorKind::invalid_index: return "invalid-index";
    case ErrorKind::bad_magic: return "bad-magic";
    case ErrorKind::bad_version: return "bad-version";
    case ErrorKind::bad_header: return "bad-header";
    case ErrorKind::truncated_header: return "truncated-header";
    case ErrorKind::truncated_record: return "truncated-record";
    case ErrorKind::count_mismatch: return "count-mismatch";
    case ErrorKind::invalid_polarity: return "invalid-polarity";
    case ErrorKind::reserved_nonzero: return "reserved-nonzero";
    case ErrorKind::column_count: return "column-count";
    case ErrorKind::unparsable: return "unparsable";
    case ErrorKind::field_range: return "field-range";
    case ErrorKind::encode: return "encode";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::degenerate_fit: return "degenerate-fit";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      module_(std::move(module)),
      detail_(message) {}

}  // namespace evkit
