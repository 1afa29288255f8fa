#include "evkit/types.hpp"

#include <cmath>
#include <string>

#include "evkit/error.hpp"

namespace evkit {

void SensorGeometry::validate() const {
  if (width == 0 || height == 0) {
    throw Error(ErrorKind::invalid_argument, "core",
                "sensor geometry must be at least 1x1, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

Frame::Frame(Timestamp t, SensorGeometry geometry, Channels channels, std::vector<double> data)
    : t_(t), geometry_(geometry), channels_(channels), data_(std::move(data)) {
  geometry_.validate();
  if (t_ < 0) throw Error(ErrorKind::invalid_argument, "core", "frame timestamp is negative");
  if (data_.size() != geometry_.pixel_count() * channel_count()) {
    throw Error(ErrorKind::geometry_mismatch, "core",
                "frame has " + std::to_string(data_.size()) + " samples, expected " +
                    std::to_string(geometry_.pixel_count() * channel_count()));
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 255.0)) {
      throw Error(ErrorKind::field_range, "core", "frame intensity outside [0, 255]");
    }
  }
}

Frame Frame::filled(Timestamp t, SensorGeometry geometry, Channels channels, double value) {
  return Frame(t, geometry, channels,
               std::vector<double>(geometry.pixel_count() * static_cast<std::size_t>(channels),
                                   value));
}

double Frame::luma(std::size_t pixel) const noexcept {
  if (channels_ == Channels::gray) return data_[pixel];
  const double* rgb = data_.data() + pixel * 3;
  return 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
}

ClassTable ClassTable::traffic() { return ClassTable{{"pedestrian", "vehicle"}}; }

std::vector<int> ClassTable::ids() const {
  std::vector<int> out(names.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

namespace {

void validate_box(const Box& b, const char* module) {
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
    throw Error(ErrorKind::field_range, module, "box coordinates must be finite");
  }
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    throw Error(ErrorKind::field_range, module, "box width and height must be positive");
  }
}

}  // namespace

void validate(const Annotation& a, const ClassTable& classes) {
  validate_box(a.box, "core");
  if (a.t < 0) throw Error(ErrorKind::field_range, "core", "annotation timestamp is negative");
  if (!classes.contains(a.class_id)) {
    throw Error(ErrorKind::field_range, "core",
                "class_id " + std::to_string(a.class_id) + " is not declared");
  }
  if (!(a.class_confidence >= 0.0 && a.class_confidence <= 1.0)) {
    throw Error(ErrorKind::field_range, "core", "class_confidence outside [0, 1]");
  }
}

void validate(const Detection& d, const ClassTable& classes) {
  validate_box(d.box, "core");
  if (d.t < 0) throw Error(ErrorKind::field_range, "core", "detection timestamp is negative");
  if (!classes.contains(d.class_id)) {
    throw Error(ErrorKind::field_range, "core",
                "class_id " + std::to_string(d.class_id) + " is not declared");
  }
  if (!(d.score >= 0.0 && d.score <= 1.0)) {
    throw Error(ErrorKind::field_range, "core", "score outside [0, 1]");
  }
}

}  // namespace evkit
