#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evkit {

/// Failure categories raised by the library. Each maps onto a stable,
/// hyphenated token (see to_string) used in CLI error lines.
enum class ErrorKind {
  invalid_argument,
  invalid_range,
  non_monotonic_frames,
  geometry_mismatch,
  empty_input,
  ordering,
  out_of_bounds,
  invalid_index,
  bad_magic,
  bad_version,
  bad_header,
  truncated_header,
  truncated_record,
  count_mismatch,
  invalid_polarity,
  reserved_nonzero,
  column_count,
  unparsable,
  field_range,
  encode,
  capacity,
  degenerate_fit,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  /// Message without the module/kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string detail_;
};

}  // namespace evkit
