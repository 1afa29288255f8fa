#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "evkit/codec.hpp"
#include "evkit/emulator.hpp"
#include "evkit/eval.hpp"
#include "evkit/image_io.hpp"
#include "evkit/mixer.hpp"
#include "evkit/render.hpp"
#include "evkit/sync.hpp"
#include "json.hpp"

namespace evkit::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

[[noreturn]] void usage_error(const std::string& what) {
  throw Error(ErrorKind::invalid_argument, "cli", what);
}

std::size_t thread_cap() {
  if (const char* env = std::getenv("EVKIT_THREADS")) {
    std::size_t n = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n == 0) {
      usage_error("EVKIT_THREADS must be a positive integer");
    }
    return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cli", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::ifstream open_input(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorKind::io, "cli", "cannot open " + path.string());
  return in;
}

/// Writes to `path`, or to `out` when the path is "-".
void emit(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path == "-") {
    out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cli", "cannot create " + path);
  f << bytes;
  if (!f) throw Error(ErrorKind::io, "cli", "write failure on " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

EventFormat resolve_format(const std::string& flag, const std::string& path) {
  if (!flag.empty()) {
    if (auto f = parse_event_format(flag)) return *f;
    usage_error("format must be evb or csv, got '" + flag + "'");
  }
  return format_from_path(path).value_or(EventFormat::evb);
}

SensorGeometry geometry_from(std::uint32_t width, std::uint32_t height) {
  SensorGeometry g{width, height};
  g.validate();
  return g;
}

Json instances_json(std::span<const Instance> xs) {
  Json arr = Json::array();
  for (const auto& x : xs) {
    arr.push_back({{"sequence_id", x.sequence_id},
                   {"offset_us", x.offset_us},
                   {"length_us", x.length_us}});
  }
  return arr;
}

Json groups_json(std::span<const Group> groups) {
  Json arr = Json::array();
  for (const auto& g : groups) {
    arr.push_back({{"duration_us", g.duration_us()}, {"instances", instances_json(g.instances)}});
  }
  return arr;
}

Json split_plan_json(const SplitPlan& p) {
  return {{"real_total_us", p.real_total_us},
          {"synthetic_total_us", p.synthetic_total_us},
          {"total_us", p.real_total_us + p.synthetic_total_us},
          {"fraction_real", p.fraction_real.value()},
          {"fraction_real_rational", p.fraction_real.str()},
          {"real", instances_json(p.real)},
          {"synthetic", instances_json(p.synthetic)}};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string_view item(text.data() + pos, comma - pos);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      usage_error("cannot parse list item '" + std::string(item) + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand options

struct EmulateArgs {
  std::string frames;
  std::string out;
  std::string format;
  EmulatorParams params;
  std::size_t tiles = 0;
};

struct AnnotateArgs {
  std::string ticks;
  std::string out;
  double rate_hz = 30.0;
  double min_speed = 0.1;
  std::string radius;
  bool normalized = false;
  std::uint32_t width = 1280;
  std::uint32_t height = 720;
};

struct RenderArgs {
  std::string events;
  std::string out_dir;
  std::string format;
  Timestamp window_us = 33333;
  Timestamp stride_us = 0;
  std::string palette = "black";
  std::string mixing = "majority";
  std::string image_format = "ppm";
  std::optional<Timestamp> start_us;
  std::optional<Timestamp> end_us;
  std::uint32_t width = 1280;
  std::uint32_t height = 720;
};

struct PoolArgs {
  std::string manifest;
  std::string out = "-";
  std::int64_t ticks = default_instance_ticks;
  Timestamp tick_period_us = default_tick_period_us;
  std::size_t per_group = default_instances_per_group;
};

struct MixArgs : PoolArgs {
  int k = 0;
  int groups = default_mix_groups;
};

struct SplitArgs : PoolArgs {
  std::size_t reserve_groups = default_mix_groups;
};

struct EvalArgs {
  std::string gt;
  std::string dets;
  std::string out = "-";
  std::string iou;
  bool coco = false;
  std::string classes = "0,1";
};

struct GapArgs {
  std::string results;
  std::string out = "-";
  std::string points_out;
  std::string scale = "percent";
};

struct InspectArgs {
  std::string in;
  std::string format;
  std::uint32_t width = 1280;
  std::uint32_t height = 720;
  Timestamp bin_us = 1000;
};

// ---------------------------------------------------------------------------
// Subcommand bodies

int do_emulate(const EmulateArgs& a, std::ostream& out, std::ostream& err) {
  a.params.validate();
  const EventFormat format = resolve_format(a.format, a.out);
  const std::size_t threads = thread_cap();

  fs::path sidecar = a.frames;
  if (fs::is_directory(sidecar)) sidecar /= "frames.csv";
  const std::vector<Frame> frames = read_frame_list(sidecar);

  EmulateOptions options;
  options.threads = threads;
  options.tiles = a.tiles > 0 ? a.tiles : threads;
  const EventStream stream = emulate(frames, a.params, options);

  if (a.out == "-") {
    write_events(out, stream, format);
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cli", "cannot create " + a.out);
    write_events(f, stream, format);
  }
  err << "emulate: " << frames.size() << " frames -> " << stream.size() << " events\n";
  return exit_ok;
}

int do_annotate(const AnnotateArgs& a, std::ostream& out, std::ostream& err) {
  double radius = 0.0;
  if (a.radius == "inf") {
    radius = std::numeric_limits<double>::infinity();
  } else {
    auto [ptr, ec] = std::from_chars(a.radius.data(), a.radius.data() + a.radius.size(), radius);
    if (ec != std::errc{} || ptr != a.radius.data() + a.radius.size()) {
      usage_error("--radius must be a number or 'inf'");
    }
  }
  if (!(radius > 0.0)) usage_error("--radius must be > 0");
  if (!(a.min_speed >= 0.0)) usage_error("--min-speed must be >= 0");
  output_period_us(a.rate_hz);
  const SensorGeometry geometry = geometry_from(a.width, a.height);

  auto in = open_input(a.ticks);
  const auto records = read_tick_log(in);
  const auto kept = filter_tick_records(records, a.min_speed, radius);
  auto annotations = resample_annotations(kept, a.rate_hz);
  if (a.normalized) annotations = normalize_boxes(annotations, geometry);
  emit(a.out, encode_annotations(annotations), out);
  err << "annotate: " << records.size() << " tick rows, " << kept.size() << " kept, "
      << annotations.size() << " annotations\n";
  return exit_ok;
}

int do_render(const RenderArgs& a, std::ostream&, std::ostream& err) {
  if (a.window_us <= 0) usage_error("--window-us must be > 0");
  const Timestamp stride = a.stride_us > 0 ? a.stride_us : a.window_us;
  if (a.stride_us < 0) usage_error("--stride-us must be > 0");
  auto palette = parse_palette(a.palette);
  if (!palette) usage_error("unrecognised --palette '" + a.palette + "'");
  if (a.mixing == "majority") {
    palette->rule = MixingRule::majority;
  } else if (a.mixing == "last") {
    palette->rule = MixingRule::last_event_wins;
  } else {
    usage_error("--mixing must be majority or last");
  }
  palette->validate();
  if (a.image_format != "ppm" && a.image_format != "png") {
    usage_error("--image-format must be ppm or png");
  }
  const EventFormat format = resolve_format(a.format, a.events);

  DecodeOptions opts;
  opts.csv_geometry = geometry_from(a.width, a.height);
  auto in = open_input(a.events, true);
  const EventStream stream = read_events(in, format, opts).stream;

  const Timestamp start = a.start_us.value_or(stream.empty() ? 0 : stream.events().front().t);
  const Timestamp end = a.end_us.value_or(stream.empty() ? 0 : stream.events().back().t + 1);
  fs::create_directories(a.out_dir);
  std::size_t index = 0;
  for (Timestamp t0 = start; t0 < end; t0 += stride, ++index) {
    const Frame frame = render_window(stream, t0, t0 + a.window_us, *palette);
    std::ostringstream name;
    name << "frame_" << std::setw(6) << std::setfill('0') << index << '.' << a.image_format;
    const fs::path path = fs::path(a.out_dir) / name.str();
    if (a.image_format == "png") {
      write_png(path, frame);
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Error(ErrorKind::io, "cli", "cannot create " + path.string());
      write_ppm(f, frame);
    }
  }
  err << "render: " << index << " frames\n";
  return exit_ok;
}

PoolConfig pool_config(const PoolArgs& a) {
  if (a.ticks <= 0) usage_error("--ticks must be > 0");
  if (a.tick_period_us <= 0) usage_error("--tick-period-us must be > 0");
  if (a.per_group == 0) usage_error("--per-group must be >= 1");
  return PoolConfig{a.ticks, a.tick_period_us, a.per_group};
}

std::vector<SequenceEntry> load_manifest(const std::string& path) {
  auto in = open_input(path);
  return read_manifest(in);
}

int do_mix(const MixArgs& a, std::ostream& out, std::ostream& err) {
  const PoolConfig config = pool_config(a);
  if (a.groups < 1) usage_error("--groups must be >= 1");
  if (a.k < 0 || a.k > a.groups) usage_error("--k must be in [0, --groups]");
  const auto manifest = load_manifest(a.manifest);
  const DomainPool real = build_pool(manifest, Domain::real, config);
  const DomainPool synthetic = build_pool(manifest, Domain::synthetic, config);
  const MixPlan plan = compose_mix(real.grouping.groups, synthetic.grouping.groups, a.k, a.groups);
  const MixReport r = report(plan);

  Json j;
  j["k"] = plan.k;
  j["total_groups"] = plan.total_groups;
  j["fraction_real"] = plan.fraction_real.value();
  j["fraction_real_rational"] = plan.fraction_real.str();
  j["totals_us"] = {{"real", plan.real_total_us},
                    {"synthetic", plan.synthetic_total_us},
                    {"total", plan.total_us()}};
  j["report"] = {{"real_seconds", r.real_seconds},
                 {"synthetic_seconds", r.synthetic_seconds},
                 {"total_seconds", r.total_seconds},
                 {"real_percent", r.real_percent},
                 {"synthetic_percent", r.synthetic_percent}};
  j["real_groups"] = groups_json(plan.real_groups);
  j["synthetic_groups"] = groups_json(plan.synthetic_groups);
  emit(a.out, dump(j), out);
  err << "mix: k=" << plan.k << " real " << r.real_seconds << " s, synthetic "
      << r.synthetic_seconds << " s\n";
  return exit_ok;
}

int do_split(const SplitArgs& a, std::ostream& out, std::ostream& err) {
  const PoolConfig config = pool_config(a);
  const auto manifest = load_manifest(a.manifest);
  const DomainPool real = build_pool(manifest, Domain::real, config);
  const DomainPool synthetic = build_pool(manifest, Domain::synthetic, config);
  const auto real_pool = unreserved(real, a.reserve_groups);
  const auto synthetic_pool = unreserved(synthetic, a.reserve_groups);
  const EvalSplit split = fixed_eval_split(real_pool, synthetic_pool);

  std::vector<Instance> all;
  for (const DomainPool* pool : {&real, &synthetic}) {
    const auto& groups = pool->grouping.groups;
    for (std::size_t g = 0; g < std::min(a.reserve_groups, groups.size()); ++g) {
      all.insert(all.end(), groups[g].instances.begin(), groups[g].instances.end());
    }
  }
  for (const SplitPlan* p : {&split.validation, &split.test}) {
    all.insert(all.end(), p->real.begin(), p->real.end());
    all.insert(all.end(), p->synthetic.begin(), p->synthetic.end());
  }
  const bool ok = disjoint(all);
  if (!ok) throw Error(ErrorKind::capacity, "mixer", "training and evaluation slices overlap");

  Json j;
  j["reserved_groups"] = a.reserve_groups;
  j["disjoint"] = ok;
  j["validation"] = split_plan_json(split.validation);
  j["test"] = split_plan_json(split.test);
  emit(a.out, dump(j), out);
  err << "split: validation " << split.validation.fraction_real.str() << " real, test "
      << split.test.fraction_real.str() << " real\n";
  return exit_ok;
}

int do_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  EvalConfig config;
  config.threads = thread_cap();
  std::vector<double> thresholds;
  if (!a.iou.empty()) thresholds = parse_list(a.iou);
  if (a.coco || thresholds.empty()) {
    const auto coco = coco_thresholds();
    thresholds.insert(thresholds.end(), coco.begin(), coco.end());
  }
  config.thresholds = thresholds;
  config.classes.clear();
  for (double c : parse_list(a.classes)) {
    if (c != static_cast<int>(c)) usage_error("--classes must list integer ids");
    config.classes.push_back(static_cast<int>(c));
  }
  ClassTable table = ClassTable::traffic();
  const int max_id = *std::max_element(config.classes.begin(), config.classes.end());
  for (int i = static_cast<int>(table.names.size()); i <= max_id; ++i) {
    table.names.push_back("class_" + std::to_string(i));
  }

  const auto gts = decode_annotations(read_file(a.gt), table);
  const auto dets = decode_detections(read_file(a.dets), table);
  const EvalReport report = evaluate(gts, dets, config);

  Json j;
  j["thresholds"] = report.thresholds;
  j["AP@50"] = optional_number(report.ap50);
  j["AP@75"] = optional_number(report.ap75);
  j["mAP"] = optional_number(report.map);
  Json classes = Json::array();
  for (const auto& c : report.classes) {
    Json per = Json::array();
    for (const auto& r : c.per_threshold) {
      per.push_back({{"iou", r.iou_threshold},
                     {"ap", optional_number(r.ap)},
                     {"gt", c.gt_count},
                     {"tp", r.true_positives},
                     {"fp", r.false_positives}});
    }
    classes.push_back({{"class_id", c.class_id},
                       {"name", table.contains(c.class_id) ? table.names[c.class_id] : ""},
                       {"gt", c.gt_count},
                       {"ap_defined", c.gt_count > 0},
                       {"per_threshold", per}});
  }
  j["classes"] = classes;
  emit(a.out, dump(j), out);
  err << "eval: " << gts.size() << " ground-truth boxes, " << dets.size() << " detections\n";
  return exit_ok;
}

int do_gap(const GapArgs& a, std::ostream& out, std::ostream& err) {
  if (a.scale != "percent" && a.scale != "unit") usage_error("--scale must be percent or unit");
  auto in = open_input(a.results);
  const auto points = read_gap_points(in);
  const GapFit fit = fit_gap_line(points);
  const double to_points = a.scale == "percent" ? 1.0 : 100.0;

  Json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["scale"] = a.scale;
  j["slope_percent_points"] = fit.slope * to_points;
  j["slope_unit"] = fit.slope * to_points / 100.0;
  Json pts = Json::array();
  for (const auto& p : fit.points) pts.push_back({{"fraction", p.fraction}, {"map", p.map}});
  j["points"] = pts;
  emit(a.out, dump(j), out);
  if (!a.points_out.empty()) {
    std::ostringstream csv;
    write_gap_points(csv, fit.points);
    emit(a.points_out, csv.str(), out);
  }
  err << "gap: " << fit.points.size() << " points, slope " << fit.slope << "\n";
  return exit_ok;
}

int do_inspect(const InspectArgs& a, std::ostream& out, std::ostream&) {
  if (a.bin_us <= 0) usage_error("--bin-us must be > 0");
  const EventFormat format = resolve_format(a.format, a.in);
  DecodeOptions opts;
  opts.csv_geometry = geometry_from(a.width, a.height);
  auto in = open_input(a.in, true);
  EventReader reader(in, format, opts);

  std::uint64_t count = 0, positive = 0;
  Timestamp first = 0, last = 0;
  Timestamp bin = std::numeric_limits<Timestamp>::min();
  std::uint64_t bin_count = 0, peak = 0;
  std::vector<Event> chunk(4096);
  while (const std::size_t n = reader.read(chunk)) {
    for (std::size_t i = 0; i < n; ++i) {
      const Event& e = chunk[i];
      if (count == 0) first = e.t;
      last = e.t;
      ++count;
      if (e.p == Polarity::positive) ++positive;
      const Timestamp b = e.t / a.bin_us;
      if (b != bin) {
        bin = b;
        bin_count = 0;
      }
      peak = std::max(peak, ++bin_count);
    }
  }
  const Timestamp duration = count > 0 ? last - first : 0;

  Json j;
  j["format"] = std::string(to_string(format));
  j["width"] = reader.geometry().width;
  j["height"] = reader.geometry().height;
  j["count"] = count;
  j["positive"] = positive;
  j["negative"] = count - positive;
  j["t_first_us"] = count > 0 ? Json(first) : Json(nullptr);
  j["t_last_us"] = count > 0 ? Json(last) : Json(nullptr);
  j["duration_us"] = duration;
  j["mean_rate_eps"] =
      duration > 0 ? Json(static_cast<double>(count) * 1e6 / static_cast<double>(duration))
                   : Json(nullptr);
  j["bin_us"] = a.bin_us;
  j["peak_bin_events"] = peak;
  j["peak_rate_eps"] = static_cast<double>(peak) * 1e6 / static_cast<double>(a.bin_us);
  out << dump(j);
  return exit_ok;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return exit_usage;
    case ErrorKind::capacity: return exit_capacity;
    default: return exit_format;
  }
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"evkit: event-camera emulation, dataset mixing and detection evaluation"};
  app.name("evkit");
  app.require_subcommand(1);

  EmulateArgs em;
  auto* emulate_cmd = app.add_subcommand("emulate", "frame sequence -> event stream");
  emulate_cmd->add_option("--frames", em.frames, "frames.csv sidecar or directory holding one")
      ->required();
  emulate_cmd->add_option("--out", em.out, "output path ('-' for stdout)")->required();
  emulate_cmd->add_option("--format", em.format, "evb or csv (default: by extension)");
  emulate_cmd->add_option("--c-pos", em.params.c_pos)->capture_default_str();
  emulate_cmd->add_option("--c-neg", em.params.c_neg)->capture_default_str();
  emulate_cmd->add_option("--sigma-pos", em.params.sigma_pos)->capture_default_str();
  emulate_cmd->add_option("--sigma-neg", em.params.sigma_neg)->capture_default_str();
  emulate_cmd->add_option("--refractory-us", em.params.refractory_us)->capture_default_str();
  emulate_cmd->add_option("--use-log", em.params.use_log)->capture_default_str();
  emulate_cmd->add_option("--log-eps", em.params.log_eps)->capture_default_str();
  emulate_cmd->add_option("--seed", em.params.seed)->capture_default_str();
  emulate_cmd->add_option("--tiles", em.tiles, "pixel bands (default: thread count)");

  AnnotateArgs an;
  auto* annotate_cmd = app.add_subcommand("annotate", "tick log -> annotation CSV");
  annotate_cmd->add_option("--ticks", an.ticks, "tick-log CSV")->required();
  annotate_cmd->add_option("--out", an.out, "output path ('-' for stdout)")->required();
  annotate_cmd->add_option("--rate-hz", an.rate_hz)->capture_default_str();
  annotate_cmd->add_option("--min-speed", an.min_speed)->capture_default_str();
  annotate_cmd->add_option("--radius", an.radius, "metres, or 'inf'")->required();
  annotate_cmd->add_flag("--normalized", an.normalized, "divide boxes by sensor size");
  annotate_cmd->add_option("--width", an.width)->capture_default_str();
  annotate_cmd->add_option("--height", an.height)->capture_default_str();

  RenderArgs re;
  auto* render_cmd = app.add_subcommand("render", "events -> polarity images");
  render_cmd->add_option("--events", re.events)->required();
  render_cmd->add_option("--out-dir", re.out_dir)->required();
  render_cmd->add_option("--format", re.format, "evb or csv (default: by extension)");
  render_cmd->add_option("--window-us", re.window_us)->capture_default_str();
  render_cmd->add_option("--stride-us", re.stride_us, "default: window");
  render_cmd->add_option("--palette", re.palette, "black, gray, or R,G,B:R,G,B:R,G,B")
      ->capture_default_str();
  render_cmd->add_option("--mixing", re.mixing, "majority or last")->capture_default_str();
  render_cmd->add_option("--image-format", re.image_format, "ppm or png")->capture_default_str();
  render_cmd->add_option("--start-us", re.start_us);
  render_cmd->add_option("--end-us", re.end_us);
  render_cmd->add_option("--width", re.width, "CSV input only")->capture_default_str();
  render_cmd->add_option("--height", re.height, "CSV input only")->capture_default_str();

  auto add_pool_flags = [](CLI::App* cmd, PoolArgs& p) {
    cmd->add_option("--manifest", p.manifest, "manifest CSV")->required();
    cmd->add_option("--out", p.out, "output path ('-' for stdout)")->capture_default_str();
    cmd->add_option("--ticks", p.ticks, "refresh cycles per instance")->capture_default_str();
    cmd->add_option("--tick-period-us", p.tick_period_us)->capture_default_str();
    cmd->add_option("--per-group", p.per_group)->capture_default_str();
  };

  MixArgs mx;
  auto* mix_cmd = app.add_subcommand("mix", "manifest -> real/synthetic training mix plan");
  add_pool_flags(mix_cmd, mx);
  mix_cmd->add_option("--k", mx.k, "number of real groups")->required();
  mix_cmd->add_option("--groups", mx.groups, "groups per training set")->capture_default_str();

  SplitArgs sp;
  auto* split_cmd = app.add_subcommand("split", "manifest -> fixed validation/test plans");
  add_pool_flags(split_cmd, sp);
  split_cmd->add_option("--reserve-groups", sp.reserve_groups, "training groups kept out")
      ->capture_default_str();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "ground truth + detections -> AP report");
  eval_cmd->add_option("--gt", ev.gt, "annotation CSV")->required();
  eval_cmd->add_option("--dets", ev.dets, "detection CSV")->required();
  eval_cmd->add_option("--out", ev.out, "output path ('-' for stdout)")->capture_default_str();
  eval_cmd->add_option("--iou", ev.iou, "comma-separated IoU thresholds");
  eval_cmd->add_flag("--coco", ev.coco, "include 0.50:0.05:0.95");
  eval_cmd->add_option("--classes", ev.classes)->capture_default_str();

  GapArgs gp;
  auto* gap_cmd = app.add_subcommand("gap", "(fraction, mAP) results -> least-squares fit");
  gap_cmd->add_option("--results", gp.results, "CSV fraction,map")->required();
  gap_cmd->add_option("--out", gp.out, "output path ('-' for stdout)")->capture_default_str();
  gap_cmd->add_option("--points-out", gp.points_out, "also write the points CSV here");
  gap_cmd->add_option("--scale", gp.scale, "percent or unit")->capture_default_str();

  InspectArgs in;
  auto* inspect_cmd = app.add_subcommand("inspect", "event file -> count/duration/rate summary");
  inspect_cmd->add_option("--in", in.in)->required();
  inspect_cmd->add_option("--format", in.format, "evb or csv (default: by extension)");
  inspect_cmd->add_option("--width", in.width, "CSV input only")->capture_default_str();
  inspect_cmd->add_option("--height", in.height, "CSV input only")->capture_default_str();
  inspect_cmd->add_option("--bin-us", in.bin_us)->capture_default_str();

  if (args.empty()) {
    err << app.help();
    return exit_usage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: cli: usage: " << one_line(e.what()) << "\n";
    return exit_usage;
  }

  try {
    if (emulate_cmd->parsed()) return do_emulate(em, out, err);
    if (annotate_cmd->parsed()) return do_annotate(an, out, err);
    if (render_cmd->parsed()) return do_render(re, out, err);
    if (mix_cmd->parsed()) return do_mix(mx, out, err);
    if (split_cmd->parsed()) return do_split(sp, out, err);
    if (eval_cmd->parsed()) return do_eval(ev, out, err);
    if (gap_cmd->parsed()) return do_gap(gp, out, err);
    if (inspect_cmd->parsed()) return do_inspect(in, out, err);
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: cli: io: " << one_line(e.what()) << "\n";
    return exit_format;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return exit_internal;
  }
  err << "error: cli: usage: no subcommand\n";
  return exit_usage;
}

}  // namespace evkit::cli
