#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evkit {

/// Microseconds since the start of a recording.
using Timestamp = std::int64_t;

enum class Polarity : std::int8_t { negative = -1, positive = 1 };

constexpr int sign(Polarity p) noexcept { return static_cast<int>(p); }

/// A single brightness-change event <x, y, t, p>.
struct Event {
  std::int32_t x = 0;
  std::int32_t y = 0;
  Timestamp t = 0;
  Polarity p = Polarity::positive;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Canonical stream order: t, then y, then x, then polarity (negative first).
constexpr bool canonical_less(const Event& a, const Event& b) noexcept {
  if (a.t != b.t) return a.t < b.t;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return sign(a.p) < sign(b.p);
}

struct SensorGeometry {
  std::uint32_t width = 1280;
  std::uint32_t height = 720;

  constexpr std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * height;
  }
  constexpr bool contains(std::int64_t x, std::int64_t y) const noexcept {
    return x >= 0 && y >= 0 && x < static_cast<std::int64_t>(width) &&
           y < static_cast<std::int64_t>(height);
  }
  /// Throws invalid_argument when either dimension is zero.
  void validate() const;

  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

/// Single-channel or RGB image with a timestamp. Intensities are in [0, 255]
/// and stored row-major, channel-interleaved.
class Frame {
 public:
  enum class Channels : std::uint8_t { gray = 1, rgb = 3 };

  Frame() = default;
  Frame(Timestamp t, SensorGeometry geometry, Channels channels, std::vector<double> data);

  static Frame filled(Timestamp t, SensorGeometry geometry, Channels channels, double value);

  Timestamp t() const noexcept { return t_; }
  const SensorGeometry& geometry() const noexcept { return geometry_; }
  Channels channels() const noexcept { return channels_; }
  std::size_t channel_count() const noexcept { return static_cast<std::size_t>(channels_); }
  std::span<const double> data() const noexcept { return data_; }

  double at(std::uint32_t x, std::uint32_t y, std::size_t c = 0) const {
    return data_[(static_cast<std::size_t>(y) * geometry_.width + x) * channel_count() + c];
  }
  /// BT.601 luma for RGB frames, the stored value for gray frames.
  double luma(std::size_t pixel) const noexcept;

 private:
  Timestamp t_ = 0;
  SensorGeometry geometry_{};
  Channels channels_ = Channels::gray;
  std::vector<double> data_;
};

/// Axis-aligned box in pixels: left, top, width, height.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const Box&, const Box&) = default;
};

/// One seven-field 1MPX row (ground truth or labelled box).
struct Annotation {
  Timestamp t = 0;
  Box box{};
  int class_id = 0;
  double class_confidence = 1.0;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Detection {
  Timestamp t = 0;
  Box box{};
  int class_id = 0;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Declared object classes; ids are indices into `names`.
struct ClassTable {
  std::vector<std::string> names;

  /// pedestrian = 0, vehicle = 1.
  static ClassTable traffic();

  bool contains(int class_id) const noexcept {
    return class_id >= 0 && static_cast<std::size_t>(class_id) < names.size();
  }
  std::vector<int> ids() const;
};

void validate(const Annotation& a, const ClassTable& classes);
void validate(const Detection& d, const ClassTable& classes);

}  // namespace evkit
