#include "evkit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>

#include "csv.hpp"
#include "evkit/error.hpp"

namespace evkit {

namespace {

constexpr const char* kModule = "image";

std::vector<std::uint8_t> to_rgb8(const Frame& frame) {
  const std::size_t pixels = frame.geometry().pixel_count();
  std::vector<std::uint8_t> out(pixels * 3);
  const auto data = frame.data();
  const std::size_t channels = frame.channel_count();
  for (std::size_t i = 0; i < pixels; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = data[i * channels + (channels == 3 ? c : 0)];
      out[i * 3 + c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  return out;
}

/// Next whitespace-separated token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
    if (token.size() > 16) break;
  }
  return token;
}

unsigned pnm_number(std::istream& in, const char* what) {
  const std::string token = pnm_token(in);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(ErrorKind::unparsable, kModule, std::string("bad PNM ") + what);
  }
  return value;
}

}  // namespace

void write_ppm(std::ostream& out, const Frame& frame) {
  const auto& g = frame.geometry();
  out << "P6\n" << g.width << ' ' << g.height << "\n255\n";
  const auto rgb = to_rgb8(frame);
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!out) throw Error(ErrorKind::io, kModule, "write failure");
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  auto rgb = to_rgb8(frame);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = frame.geometry().width;
  image.height = frame.geometry().height;
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, rgb.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::io, kModule, "cannot write " + path.string() + ": " + message);
  }
}

Frame read_pnm(std::istream& in, Timestamp t) {
  const std::string magic = pnm_token(in);
  const bool gray = magic == "P2" || magic == "P5";
  const bool ascii = magic == "P2" || magic == "P3";
  if (!gray && magic != "P3" && magic != "P6") {
    throw Error(ErrorKind::unparsable, kModule, "unsupported PNM magic '" + magic + "'");
  }
  const unsigned width = pnm_number(in, "width");
  const unsigned height = pnm_number(in, "height");
  const unsigned maxval = pnm_number(in, "maxval");
  if (maxval == 0 || maxval > 255) {
    throw Error(ErrorKind::unparsable, kModule, "PNM maxval must be in [1, 255]");
  }
  const SensorGeometry geometry{width, height};
  geometry.validate();
  const std::size_t channels = gray ? 1 : 3;
  std::vector<double> data(geometry.pixel_count() * channels);
  const double scale = 255.0 / maxval;
  if (ascii) {
    for (auto& v : data) v = std::min(pnm_number(in, "sample"), maxval) * scale;
  } else {
    std::vector<std::uint8_t> raw(data.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw Error(ErrorKind::truncated_record, kModule, "PNM pixel data truncated");
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      data[i] = std::min<unsigned>(raw[i], maxval) * scale;
    }
  }
  return Frame(t, geometry, gray ? Frame::Channels::gray : Frame::Channels::rgb, std::move(data));
}

Frame read_image(const std::filesystem::path& path, Timestamp t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, kModule, "cannot open " + path.string());
  char sig[8]{};
  in.read(sig, 8);
  const bool is_png = in.gcount() == 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(sig), 0, 8) == 0;
  if (!is_png) {
    in.clear();
    in.seekg(0);
    return read_pnm(in, t);
  }
  in.close();

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error(ErrorKind::unparsable, kModule, path.string() + ": " + image.message);
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::unparsable, kModule, path.string() + ": " + message);
  }
  std::vector<double> data(raw.begin(), raw.end());
  return Frame(t, SensorGeometry{image.width, image.height},
               gray ? Frame::Channels::gray : Frame::Channels::rgb, std::move(data));
}

std::vector<Frame> read_frame_list(const std::filesystem::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw Error(ErrorKind::io, kModule, "cannot open " + sidecar.string());
  detail::LineReader reader(in, kModule);
  std::string_view line;
  if (!reader.next(line) || line != "index,t_us,path") {
    detail::row_error(ErrorKind::unparsable, kModule, 1, "expected header 'index,t_us,path'");
  }
  std::map<std::int64_t, std::pair<Timestamp, std::filesystem::path>> rows;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const std::size_t row = reader.row();
    auto f = detail::split_fields(line);
    if (f.size() != 3) {
      detail::row_error(ErrorKind::column_count, kModule, row,
                        "expected 3 fields, got " + std::to_string(f.size()));
    }
    const auto index = detail::parse_int<std::int64_t>(f[0], kModule, row, "index");
    const auto t = detail::parse_int<Timestamp>(f[1], kModule, row, "t_us");
    std::filesystem::path p{std::string(f[2])};
    if (p.is_relative()) p = sidecar.parent_path() / p;
    if (!rows.emplace(index, std::make_pair(t, p)).second) {
      detail::row_error(ErrorKind::invalid_index, kModule, row,
                        "duplicate frame index " + std::to_string(index));
    }
  }
  std::vector<Frame> frames;
  frames.reserve(rows.size());
  for (const auto& [index, entry] : rows) frames.push_back(read_image(entry.second, entry.first));
  return frames;
}

}  // namespace evkit
