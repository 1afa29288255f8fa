#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "evkit/stream.hpp"
#include "evkit/types.hpp"

namespace evkit {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class MixingRule { majority, last_event_wins };

/// Polarity colouring: positive blue, negative red by default.
struct Palette {
  Rgb positive{0, 0, 255};
  Rgb negative{255, 0, 0};
  Rgb background{0, 0, 0};
  MixingRule rule = MixingRule::majority;

  static Palette on_black() { return Palette{}; }
  static Palette on_gray() { return Palette{{0, 0, 255}, {255, 0, 0}, {128, 128, 128}}; }

  /// Throws invalid-argument if any two colours coincide.
  void validate() const;
};

/// Parses "black", "gray", or "R,G,B:R,G,B:R,G,B" (positive:negative:background).
std::optional<Palette> parse_palette(std::string_view text);

struct PolarityCounts {
  SensorGeometry geometry;
  std::vector<std::uint32_t> positive;
  std::vector<std::uint32_t> negative;
};

/// Per-pixel event counts over [t0, t1).
PolarityCounts accumulate_counts(const EventStream& stream, Timestamp t0, Timestamp t1);

/// Renders events in [t0, t1) into an RGB frame stamped with t0. Throws
/// invalid-range unless t0 < t1.
Frame render_window(const EventStream& stream, Timestamp t0, Timestamp t1, const Palette& palette);

}  // namespace evkit
