#include "evkit/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "evkit/error.hpp"
#include "parallel.hpp"

namespace evkit {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_keys(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c, std::uint64_t lane) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return splitmix64(h ^ lane);
}

}  // namespace

void EmulatorParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::invalid_argument, "emulator", what);
  };
  if (!(c_pos > 0.0) || !std::isfinite(c_pos)) fail("c_pos must be positive");
  if (!(c_neg > 0.0) || !std::isfinite(c_neg)) fail("c_neg must be positive");
  if (!(sigma_pos >= 0.0) || !std::isfinite(sigma_pos)) fail("sigma_pos must be >= 0");
  if (!(sigma_neg >= 0.0) || !std::isfinite(sigma_neg)) fail("sigma_neg must be >= 0");
  if (refractory_us < 0) fail("refractory must be >= 0");
  if (use_log && (!(log_eps > 0.0) || !std::isfinite(log_eps))) fail("log_eps must be positive");
}

double log_map(double intensity, const EmulatorParams& params) {
  const double normalized = intensity / 255.0;
  return params.use_log ? std::log(normalized + params.log_eps) : normalized;
}

double threshold_noise(std::uint64_t seed, std::uint64_t pixel_index, std::uint64_t frame_index,
                       std::uint64_t ordinal) noexcept {
  const std::uint64_t h1 = hash_keys(seed, pixel_index, frame_index, ordinal, 0);
  const std::uint64_t h2 = hash_keys(seed, pixel_index, frame_index, ordinal, 1);
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = (static_cast<double>(h1 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PixelState step_pixel(const PixelState& state, double l_new, Timestamp t_prev, Timestamp t_new,
                      const EmulatorParams& params, const PixelSite& site,
                      std::vector<Event>& out) {
  if (t_prev >= t_new) {
    throw Error(ErrorKind::non_monotonic_frames, "emulator",
                "frame times must increase, got " + std::to_string(t_prev) + " then " +
                    std::to_string(t_new));
  }
  PixelState next = state;
  const double delta = l_new - state.l_ref;
  if (delta == 0.0 || !std::isfinite(delta)) return next;

  const Polarity polarity = delta > 0.0 ? Polarity::positive : Polarity::negative;
  const double direction = delta > 0.0 ? 1.0 : -1.0;
  const double mean = delta > 0.0 ? params.c_pos : params.c_neg;
  const double sigma = delta > 0.0 ? params.sigma_pos : params.sigma_neg;
  const double magnitude = std::abs(delta);
  const auto span = static_cast<double>(t_new - t_prev);

  double crossed = 0.0;
  for (std::uint64_t ordinal = 0;; ++ordinal) {
    double threshold = mean;
    if (sigma > 0.0) {
      threshold = std::max(
          min_threshold,
          mean + sigma * threshold_noise(params.seed, site.pixel_index, site.frame_index, ordinal));
    }
    if (magnitude - crossed < threshold - threshold_tolerance) break;
    crossed += threshold;

    const double fraction = std::min(crossed / magnitude, 1.0);
    const Timestamp t = t_prev + static_cast<Timestamp>(std::llround(fraction * span));
    if (next.t_last && t - *next.t_last < params.refractory_us) break;

    out.push_back(Event{site.x, site.y, t, polarity});
    next.l_ref += direction * threshold;
    next.t_last = t;
  }
  return next;
}

PixelStep step_pixel(const PixelState& state, double l_new, Timestamp t_prev, Timestamp t_new,
                     const EmulatorParams& params, const PixelSite& site) {
  PixelStep result;
  result.state = step_pixel(state, l_new, t_prev, t_new, params, site, result.events);
  return result;
}

EventStream emulate(std::span<const Frame> frames, const EmulatorParams& params,
                    const EmulateOptions& options) {
  params.validate();
  if (frames.empty()) throw Error(ErrorKind::empty_input, "emulator", "no frames");

  const SensorGeometry geometry = frames.front().geometry();
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].geometry() != geometry) {
      throw Error(ErrorKind::geometry_mismatch, "emulator",
                  "frame " + std::to_string(i) + " geometry differs from frame 0");
    }
    if (frames[i].t() <= frames[i - 1].t()) {
      throw Error(ErrorKind::non_monotonic_frames, "emulator",
                  "frame " + std::to_string(i) + " timestamp does not increase");
    }
  }

  const std::size_t tiles = std::clamp<std::size_t>(options.tiles, 1, geometry.height);
  std::vector<std::vector<Event>> tile_events(tiles);

  detail::parallel_for(tiles, options.threads, [&](std::size_t tile) {
    const std::uint32_t row_begin = static_cast<std::uint32_t>(geometry.height * tile / tiles);
    const std::uint32_t row_end = static_cast<std::uint32_t>(geometry.height * (tile + 1) / tiles);
    const std::size_t first = static_cast<std::size_t>(row_begin) * geometry.width;
    const std::size_t last = static_cast<std::size_t>(row_end) * geometry.width;

    std::vector<PixelState> states(last - first);
    for (std::size_t i = first; i < last; ++i) {
      states[i - first].l_ref = log_map(frames.front().luma(i), params);
    }
    auto& out = tile_events[tile];
    for (std::size_t f = 1; f < frames.size(); ++f) {
      const Frame& frame = frames[f];
      const Timestamp t_prev = frames[f - 1].t();
      for (std::size_t i = first; i < last; ++i) {
        const PixelSite site{static_cast<std::int32_t>(i % geometry.width),
                             static_cast<std::int32_t>(i / geometry.width), i, f};
        states[i - first] =
            step_pixel(states[i - first], log_map(frame.luma(i), params), t_prev, frame.t(),
                       params, site, out);
      }
    }
  });

  std::size_t total = 0;
  for (const auto& v : tile_events) total += v.size();
  std::vector<Event> merged;
  merged.reserve(total);
  for (auto& v : tile_events) {
    merged.insert(merged.end(), v.begin(), v.end());
    std::vector<Event>().swap(v);
  }
  return EventStream::canonicalize(geometry, std::move(merged));
}

}  // namespace evkit
