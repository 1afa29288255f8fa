#include "evkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "csv.hpp"
#include "evkit/error.hpp"
#include "parallel.hpp"

namespace evkit {

namespace {

constexpr const char* kModule = "eval";

std::optional<double> mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

double iou(const Box& a, const Box& b) noexcept {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

MatchSet match_detections(std::span<const Annotation> gts, std::span<const Detection> dets,
                          double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, kModule, "IoU threshold must be in (0, 1]");
  }
  std::map<std::pair<Timestamp, int>, std::vector<std::size_t>> buckets;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    buckets[{gts[g].t, gts[g].class_id}].push_back(g);
  }

  MatchSet m;
  m.order.resize(dets.size());
  std::iota(m.order.begin(), m.order.end(), std::size_t{0});
  std::stable_sort(m.order.begin(), m.order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  m.matched_gt.assign(dets.size(), std::nullopt);

  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : m.order) {
    const auto it = buckets.find({dets[d].t, dets[d].class_id});
    std::optional<std::size_t> best;
    double best_iou = iou_threshold;
    if (it != buckets.end()) {
      for (std::size_t g : it->second) {
        if (taken[g]) continue;
        const double v = iou(dets[d].box, gts[g].box);
        if (v >= best_iou && (!best || v > best_iou)) {
          best = g;
          best_iou = v;
        }
      }
    }
    if (best) {
      taken[*best] = true;
      m.matched_gt[d] = best;
      ++m.true_positives;
    } else {
      ++m.false_positives;
    }
  }
  m.false_negatives = gts.size() - m.true_positives;
  return m;
}

namespace {

double ap_from_matches(const MatchSet& m, std::size_t gt_count) {
  std::vector<double> recall;
  std::vector<double> precision;
  recall.reserve(m.order.size());
  precision.reserve(m.order.size());
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (std::size_t d : m.order) {
    ++seen;
    if (m.matched_gt[d]) ++tp;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(gt_count));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(seen));
  }
  // Precision envelope: best precision at any recall >= this one.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  std::size_t j = 0;
  for (int step = 0; step <= 100; ++step) {
    const double r = step / 100.0;
    while (j < recall.size() && recall[j] < r) ++j;
    if (j == recall.size()) break;
    sum += precision[j];
  }
  return sum / 101.0;
}

}  // namespace

std::optional<double> average_precision(std::span<const Annotation> gts,
                                        std::span<const Detection> dets, double iou_threshold) {
  const MatchSet m = match_detections(gts, dets, iou_threshold);
  if (gts.empty()) return std::nullopt;
  return ap_from_matches(m, gts.size());
}

std::vector<double> coco_thresholds() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back((50 + 5 * i) / 100.0);
  return out;
}

std::optional<double> EvalReport::class_mean_at(double threshold) const {
  std::vector<double> aps;
  bool configured = false;
  for (const auto& c : classes) {
    for (const auto& r : c.per_threshold) {
      if (std::abs(r.iou_threshold - threshold) < 1e-12) {
        configured = true;
        if (r.ap) aps.push_back(*r.ap);
      }
    }
  }
  return configured ? mean(aps) : std::nullopt;
}

EvalReport evaluate(std::span<const Annotation> gts, std::span<const Detection> dets,
                    const EvalConfig& config) {
  if (config.classes.empty()) throw Error(ErrorKind::invalid_argument, kModule, "empty class set");
  if (config.thresholds.empty()) {
    throw Error(ErrorKind::invalid_argument, kModule, "no IoU thresholds");
  }
  for (double t : config.thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw Error(ErrorKind::invalid_argument, kModule, "IoU threshold must be in (0, 1]");
    }
  }
  std::set<int> unique(config.classes.begin(), config.classes.end());
  std::set<double> thresholds(config.thresholds.begin(), config.thresholds.end());

  EvalReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());

  std::vector<std::vector<Annotation>> class_gts;
  std::vector<std::vector<Detection>> class_dets;
  for (int c : unique) {
    ClassResult cr;
    cr.class_id = c;
    auto& g = class_gts.emplace_back();
    auto& d = class_dets.emplace_back();
    for (const auto& a : gts) {
      if (a.class_id == c) g.push_back(a);
    }
    for (const auto& x : dets) {
      if (x.class_id == c) d.push_back(x);
    }
    cr.gt_count = g.size();
    cr.per_threshold.resize(report.thresholds.size());
    report.classes.push_back(std::move(cr));
  }

  const std::size_t n_thr = report.thresholds.size();
  detail::parallel_for(report.classes.size() * n_thr, config.threads, [&](std::size_t job) {
    const std::size_t c = job / n_thr;
    const std::size_t t = job % n_thr;
    ThresholdResult& out = report.classes[c].per_threshold[t];
    out.iou_threshold = report.thresholds[t];
    const MatchSet m = match_detections(class_gts[c], class_dets[c], out.iou_threshold);
    out.true_positives = m.true_positives;
    out.false_positives = m.false_positives;
    if (!class_gts[c].empty()) out.ap = ap_from_matches(m, class_gts[c].size());
  });

  std::vector<double> all;
  for (const auto& c : report.classes) {
    for (const auto& r : c.per_threshold) {
      if (r.ap) all.push_back(*r.ap);
    }
  }
  report.map = mean(all);
  report.ap50 = report.class_mean_at(0.50);
  report.ap75 = report.class_mean_at(0.75);
  return report;
}

GapFit fit_gap_line(std::span<const GapPoint> points) {
  std::set<double> distinct;
  for (const auto& p : points) {
    if (!std::isfinite(p.fraction) || !std::isfinite(p.map)) {
      throw Error(ErrorKind::invalid_argument, kModule, "gap points must be finite");
    }
    distinct.insert(p.fraction);
  }
  if (distinct.size() < 2) {
    throw Error(ErrorKind::degenerate_fit, kModule,
                "need at least 2 distinct fractions, got " + std::to_string(distinct.size()));
  }
  const auto n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.fraction;
    my += p.map;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    sxx += (p.fraction - mx) * (p.fraction - mx);
    sxy += (p.fraction - mx) * (p.map - my);
    syy += (p.map - my) * (p.map - my);
  }
  GapFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& p : points) {
    const double r = p.map - (fit.intercept + fit.slope * p.fraction);
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.points.assign(points.begin(), points.end());
  return fit;
}

std::vector<GapPoint> read_gap_points(std::istream& in) {
  detail::LineReader reader(in, kModule);
  std::string_view line;
  if (!reader.next(line) || line != "fraction,map") {
    detail::row_error(ErrorKind::unparsable, kModule, 1, "expected header 'fraction,map'");
  }
  std::vector<GapPoint> points;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const std::size_t row = reader.row();
    auto f = detail::split_fields(line);
    if (f.size() != 2) {
      detail::row_error(ErrorKind::column_count, kModule, row,
                        "expected 2 fields, got " + std::to_string(f.size()));
    }
    points.push_back(GapPoint{detail::parse_double(f[0], kModule, row, "fraction"),
                              detail::parse_double(f[1], kModule, row, "map")});
  }
  return points;
}

void write_gap_points(std::ostream& out, std::span<const GapPoint> points) {
  std::string buf = "fraction,map\n";
  for (const auto& p : points) {
    detail::append_double(buf, p.fraction);
    buf += ',';
    detail::append_double(buf, p.map);
    buf += '\n';
  }
  out << buf;
}

}  // namespace evkit
