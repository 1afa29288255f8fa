#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "evkit/error.hpp"

namespace evkit::detail {

/// Splits one CSV line on commas. No quoting: every format handled here is
/// purely numeric apart from identifier columns that never contain commas.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

[[noreturn]] inline void row_error(ErrorKind kind, const char* module, std::size_t row,
                                   const std::string& what) {
  throw Error(kind, module, "row " + std::to_string(row) + ": " + what);
}

template <class Int>
Int parse_int(std::string_view field, const char* module, std::size_t row, const char* name) {
  Int value{};
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    row_error(ErrorKind::unparsable, module, row,
              std::string("cannot parse ") + name + " from '" + std::string(field) + "'");
  }
  return value;
}

inline double parse_double(std::string_view field, const char* module, std::size_t row,
                           const char* name) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    row_error(ErrorKind::unparsable, module, row,
              std::string("cannot parse ") + name + " from '" + std::string(field) + "'");
  }
  return value;
}

/// Shortest decimal text that parses back to the same double.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

inline void append_fixed(std::string& out, double v, int precision) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  out.append(buf, ptr);
}

template <class Int>
void append_int(std::string& out, Int v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

/// Line reader with a hard cap on line length so memory stays bounded.
class LineReader {
 public:
  LineReader(std::istream& in, const char* module, std::size_t max_line = 4096)
      : in_(in), module_(module), buffer_(max_line + 1, '\0') {}

  /// Returns false at end of input. Row numbers are 1-based line numbers.
  bool next(std::string_view& line) {
    if (!in_.getline(buffer_.data(), static_cast<std::streamsize>(buffer_.size()))) {
      if (in_.eof() && in_.gcount() > 0) {
        // Final line without trailing newline.
        ++row_;
        line = strip_cr(std::string_view(buffer_.data(), static_cast<std::size_t>(in_.gcount())));
        return true;
      }
      if (in_.eof()) return false;
      if (in_.fail() && !in_.bad()) {
        row_error(ErrorKind::unparsable, module_, row_ + 1, "line exceeds maximum length");
      }
      throw Error(ErrorKind::io, module_, "read failure");
    }
    ++row_;
    std::size_t n = static_cast<std::size_t>(in_.gcount());
    if (n > 0 && !in_.eof()) --n;  // getline counts the extracted newline
    line = strip_cr(std::string_view(buffer_.data(), n));
    return true;
  }

  std::size_t row() const noexcept { return row_; }

 private:
  std::istream& in_;
  const char* module_;
  std::vector<char> buffer_;
  std::size_t row_ = 0;
};

}  // namespace evkit::detail
