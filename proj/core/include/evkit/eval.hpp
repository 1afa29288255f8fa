#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "evkit/types.hpp"

namespace evkit {

/// Intersection over union of two boxes with positive extent.
double iou(const Box& a, const Box& b) noexcept;

struct MatchSet {
  /// Detection indices in descending score order (ties keep input order).
  std::vector<std::size_t> order;
  /// Indexed like the detection input: matched ground-truth index, if any.
  std::vector<std::optional<std::size_t>> matched_gt;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

/// Greedy matching in descending score order. A detection may only match a
/// ground truth with the same timestamp and class; it takes the unmatched
/// one with the highest IoU >= iou_threshold.
MatchSet match_detections(std::span<const Annotation> gts, std::span<const Detection> dets,
                          double iou_threshold);

/// 101-point interpolated AP. Empty when there is no ground truth.
std::optional<double> average_precision(std::span<const Annotation> gts,
                                        std::span<const Detection> dets, double iou_threshold);

/// 0.50, 0.55, ..., 0.95
std::vector<double> coco_thresholds();

struct EvalConfig {
  std::vector<double> thresholds = coco_thresholds();
  std::vector<int> classes = {0, 1};
  std::size_t threads = 1;
};

struct ThresholdResult {
  double iou_threshold = 0.0;
  std::optional<double> ap;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
};

struct ClassResult {
  int class_id = 0;
  std::size_t gt_count = 0;
  std::vector<ThresholdResult> per_threshold;
};

struct EvalReport {
  std::vector<double> thresholds;
  std::vector<ClassResult> classes;
  /// Class means at IoU 0.50 / 0.75 (when configured) and over every
  /// configured threshold. Classes without ground truth are excluded.
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::optional<double> map;

  std::optional<double> class_mean_at(double threshold) const;
};

EvalReport evaluate(std::span<const Annotation> gts, std::span<const Detection> dets,
                    const EvalConfig& config = {});

struct GapPoint {
  double fraction = 0.0;
  double map = 0.0;
};

struct GapFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<GapPoint> points;
};

/// Ordinary least squares of mAP on real-data fraction. Needs two distinct
/// fractions; throws degenerate-fit otherwise.
GapFit fit_gap_line(std::span<const GapPoint> points);

/// CSV `fraction,map`.
std::vector<GapPoint> read_gap_points(std::istream& in);
void write_gap_points(std::ostream& out, std::span<const GapPoint> points);

}  // namespace evkit
