#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evkit/stream.hpp"
#include "evkit/types.hpp"

namespace evkit {

/// DVS pixel model configuration. Thresholds are in log-intensity units when
/// `use_log` is set and in normalised linear intensity otherwise.
struct EmulatorParams {
  double c_pos = 0.3;
  double c_neg = 0.3;
  double sigma_pos = 0.0;
  double sigma_neg = 0.0;
  Timestamp refractory_us = 0;
  bool use_log = true;
  double log_eps = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Floor applied to every sampled threshold.
inline constexpr double min_threshold = 0.01;

/// Slack on the threshold comparison so that a change of exactly n*C in
/// real arithmetic still yields n events after floating-point rounding.
inline constexpr double threshold_tolerance = 1e-9;

struct PixelState {
  double l_ref = 0.0;
  std::optional<Timestamp> t_last;
};

/// Identifies one pixel during one frame pair; keys the counter-based noise
/// generator and supplies the coordinates stamped on emitted events.
struct PixelSite {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::uint64_t pixel_index = 0;
  std::uint64_t frame_index = 0;
};

struct PixelStep {
  std::vector<Event> events;
  PixelState state;
};

double log_map(double intensity, const EmulatorParams& params);

/// Standard normal variate that depends only on its four keys.
double threshold_noise(std::uint64_t seed, std::uint64_t pixel_index, std::uint64_t frame_index,
                       std::uint64_t ordinal) noexcept;

/// Advances one pixel from t_prev to t_new, appending emitted events to
/// `out`. Integrator model: l_ref moves by one sampled threshold per
/// emitted event and keeps the sub-threshold residual. Event times are
/// linearly interpolated inside the frame pair. A candidate inside the
/// refractory window is dropped and ends the pair for this pixel.
PixelState step_pixel(const PixelState& state, double l_new, Timestamp t_prev, Timestamp t_new,
                      const EmulatorParams& params, const PixelSite& site,
                      std::vector<Event>& out);

PixelStep step_pixel(const PixelState& state, double l_new, Timestamp t_prev, Timestamp t_new,
                     const EmulatorParams& params, const PixelSite& site);

struct EmulateOptions {
  /// Number of horizontal pixel bands processed independently. Output does
  /// not depend on this value.
  std::size_t tiles = 1;
  std::size_t threads = 1;
};

/// Converts a frame sequence into a canonical event stream. RGB frames are
/// reduced to BT.601 luma.
EventStream emulate(std::span<const Frame> frames, const EmulatorParams& params,
                    const EmulateOptions& options = {});

}  // namespace evkit
