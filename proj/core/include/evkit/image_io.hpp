#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "evkit/types.hpp"

namespace evkit {

/// Binary PPM (P6) with maxval 255; samples are rounded to the nearest
/// integer. Gray frames are written with R = G = B.
void write_ppm(std::ostream& out, const Frame& frame);
void write_png(const std::filesystem::path& path, const Frame& frame);

/// Reads PGM (P2/P5) or PPM (P3/P6) with maxval <= 255, or PNG (8-bit gray
/// or RGB after conversion). The returned frame carries timestamp `t`.
Frame read_image(const std::filesystem::path& path, Timestamp t = 0);
Frame read_pnm(std::istream& in, Timestamp t = 0);

/// Frame list sidecar `index,t_us,path`; relative paths resolve against the
/// sidecar's directory. Rows are returned sorted by index.
std::vector<Frame> read_frame_list(const std::filesystem::path& sidecar);

}  // namespace evkit
