#include "evkit/render.hpp"

#include <charconv>
#include <string>

#include "evkit/error.hpp"

namespace evkit {

void Palette::validate() const {
  if (positive == negative || positive == background || negative == background) {
    throw Error(ErrorKind::invalid_argument, "render", "palette colours must be distinct");
  }
}

std::optional<Palette> parse_palette(std::string_view text) {
  if (text == "black") return Palette::on_black();
  if (text == "gray" || text == "grey") return Palette::on_gray();

  Rgb colours[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos) return std::nullopt;
    std::string_view part = text.substr(pos, end - pos);
    pos = end + 1;
    std::uint8_t* channels[3] = {&colours[i].r, &colours[i].g, &colours[i].b};
    std::size_t cpos = 0;
    for (int c = 0; c < 3; ++c) {
      const std::size_t cend = c < 2 ? part.find(',', cpos) : part.size();
      if (cend == std::string_view::npos) return std::nullopt;
      unsigned v = 0;
      auto [ptr, ec] = std::from_chars(part.data() + cpos, part.data() + cend, v);
      if (ec != std::errc{} || ptr != part.data() + cend || v > 255) return std::nullopt;
      *channels[c] = static_cast<std::uint8_t>(v);
      cpos = cend + 1;
    }
  }
  Palette p;
  p.positive = colours[0];
  p.negative = colours[1];
  p.background = colours[2];
  return p;
}

PolarityCounts accumulate_counts(const EventStream& stream, Timestamp t0, Timestamp t1) {
  if (t0 >= t1) {
    throw Error(ErrorKind::invalid_range, "render",
                "window [" + std::to_string(t0) + ", " + std::to_string(t1) + ") is empty");
  }
  const auto& g = stream.geometry();
  PolarityCounts counts{g, std::vector<std::uint32_t>(g.pixel_count()),
                        std::vector<std::uint32_t>(g.pixel_count())};
  const auto events = stream.events();
  const auto [first, last] = window_bounds(events, t0, t1);
  for (std::size_t i = first; i < last; ++i) {
    const Event& e = events[i];
    const std::size_t idx = static_cast<std::size_t>(e.y) * g.width + e.x;
    (e.p == Polarity::positive ? counts.positive : counts.negative)[idx]++;
  }
  return counts;
}

Frame render_window(const EventStream& stream, Timestamp t0, Timestamp t1, const Palette& palette) {
  palette.validate();
  const PolarityCounts counts = accumulate_counts(stream, t0, t1);
  const auto& g = stream.geometry();

  // Polarity of the temporally last event per pixel: 0 none, +1 / -1.
  std::vector<std::int8_t> last(g.pixel_count(), 0);
  const auto events = stream.events();
  const auto [first, end] = window_bounds(events, t0, t1);
  for (std::size_t i = first; i < end; ++i) {
    last[static_cast<std::size_t>(events[i].y) * g.width + events[i].x] =
        static_cast<std::int8_t>(sign(events[i].p));
  }

  std::vector<double> data(g.pixel_count() * 3);
  for (std::size_t i = 0; i < g.pixel_count(); ++i) {
    Rgb colour = palette.background;
    if (last[i] != 0) {
      bool positive = last[i] > 0;
      if (palette.rule == MixingRule::majority && counts.positive[i] != counts.negative[i]) {
        positive = counts.positive[i] > counts.negative[i];
      }
      colour = positive ? palette.positive : palette.negative;
    }
    data[i * 3] = colour.r;
    data[i * 3 + 1] = colour.g;
    data[i * 3 + 2] = colour.b;
  }
  return Frame(t0, g, Frame::Channels::rgb, std::move(data));
}

}  // namespace evkit
