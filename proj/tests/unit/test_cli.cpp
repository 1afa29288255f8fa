#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "evkit/codec.hpp"
#include "evkit/emulator.hpp"
#include "evkit/image_io.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kFixtures = EVKIT_FIXTURE_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = evkit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return (kFixtures / name).string(); }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("evkit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool single_error_line(const std::string& err, const std::string& prefix) {
  return err.rfind(prefix, 0) == 0 && err.find('\n') == err.size() - 1;
}

}  // namespace

TEST_CASE("usage and argument errors") {
  const auto none = run({});
  CHECK(none.code == 2);
  CHECK(none.err.find("Usage") != std::string::npos);

  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("emulate") != std::string::npos);

  const auto sub_help = run({"mix", "--help"});
  CHECK(sub_help.code == 0);
  CHECK(sub_help.out.find("--manifest") != std::string::npos);

  const auto unknown = run({"frobnicate"});
  CHECK(unknown.code == 2);
  CHECK(single_error_line(unknown.err, "error: cli: usage: "));

  const auto flag = run({"gap", "--results", fx("results.csv"), "--bogus", "1"});
  CHECK(flag.code == 2);
  CHECK(single_error_line(flag.err, "error: cli: usage: "));

  const auto missing = run({"annotate", "--ticks", fx("ticks.csv"), "--out", "-"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("--radius") != std::string::npos);

  const auto bad_value = run({"render", "--events", fx("events.csv"), "--out-dir", "x",
                              "--width", "4", "--height", "3", "--mixing", "median"});
  CHECK(bad_value.code == 2);
  CHECK(single_error_line(bad_value.err, "error: cli: invalid-argument: "));
}

TEST_CASE("format and capacity errors map to exit codes") {
  const auto dir = scratch("errors");
  {
    std::ofstream bad(dir / "bad.evb", std::ios::binary);
    bad << "EVB2" << std::string(20, '\0');
  }
  const auto r = run({"inspect", "--in", (dir / "bad.evb").string()});
  CHECK(r.code == 3);
  CHECK(single_error_line(r.err, "error: codec: bad-magic: "));

  const auto missing_file = run({"inspect", "--in", (dir / "nope.evb").string()});
  CHECK(missing_file.code == 3);

  const auto capacity = run({"split", "--manifest", fx("manifest.csv"), "--reserve-groups", "8"});
  CHECK(capacity.code == 4);
  CHECK(single_error_line(capacity.err, "error: mixer: capacity: "));

  CHECK(evkit::cli::exit_code_for(evkit::ErrorKind::capacity) == 4);
  CHECK(evkit::cli::exit_code_for(evkit::ErrorKind::truncated_record) == 3);
  CHECK(evkit::cli::exit_code_for(evkit::ErrorKind::invalid_argument) == 2);
  fs::remove_all(dir);
}

TEST_CASE("emulate then inspect agrees with the library") {
  const auto dir = scratch("emulate");
  const auto out = (dir / "events.evb").string();
  const auto r = run({"emulate", "--frames", fx("frames"), "--out", out, "--c-pos", "0.2",
                      "--c-neg", "0.25", "--seed", "7", "--sigma-pos", "0.03"});
  REQUIRE(r.code == 0);

  evkit::EmulatorParams p;
  p.c_pos = 0.2;
  p.c_neg = 0.25;
  p.sigma_pos = 0.03;
  p.seed = 7;
  const auto frames = evkit::read_frame_list(kFixtures / "frames" / "frames.csv");
  const auto expected = evkit::emulate(frames, p);
  const auto bytes = slurp(out);
  CHECK(bytes.size() == 24 + 16 * expected.size());
  const auto ref = evkit::encode_events(expected, evkit::EventFormat::evb);
  CHECK(std::string(ref.begin(), ref.end()) == bytes);

  const auto inspect = run({"inspect", "--in", out});
  REQUIRE(inspect.code == 0);
  const auto j = Json::parse(inspect.out);
  CHECK(j["count"] == expected.size());
  CHECK(j["width"] == 4);
  CHECK(j["height"] == 3);

  // Thread count must not change the bytes.
  const auto out2 = (dir / "events_tiled.evb").string();
  REQUIRE(run({"emulate", "--frames", fx("frames/frames.csv"), "--out", out2, "--c-pos", "0.2",
               "--c-neg", "0.25", "--seed", "7", "--sigma-pos", "0.03", "--tiles", "3"})
              .code == 0);
  CHECK(slurp(out2) == bytes);
  fs::remove_all(dir);
}

TEST_CASE("annotate filters slow and distant actors onto the 30 Hz grid") {
  const auto r = run({"annotate", "--ticks", fx("ticks.csv"), "--out", "-", "--radius", "100"});
  REQUIRE(r.code == 0);
  const auto rows = evkit::decode_annotations(r.out);
  REQUIRE_FALSE(rows.empty());
  for (const auto& a : rows) {
    CHECK(a.t % 33333 == 0);
    CHECK(a.class_id == 1);
  }
  const auto all = run({"annotate", "--ticks", fx("ticks.csv"), "--out", "-", "--radius", "inf"});
  CHECK(evkit::decode_annotations(all.out).size() > rows.size());
  const auto norm = run({"annotate", "--ticks", fx("ticks.csv"), "--out", "-", "--radius", "inf",
                         "--normalized"});
  for (const auto& a : evkit::decode_annotations(norm.out)) CHECK(a.box.x < 1.0);
}

TEST_CASE("mix reports exact sevenths") {
  for (int k = 0; k <= 7; ++k) {
    const auto r = run({"mix", "--manifest", fx("manifest.csv"), "--k", std::to_string(k)});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["fraction_real"].get<double>() == static_cast<double>(k) / 7.0);
    CHECK(j["totals_us"]["total"] == 2331000000LL);
    CHECK(j["real_groups"].size() == static_cast<std::size_t>(k));
  }
  const auto one = Json::parse(run({"mix", "--manifest", fx("manifest.csv"), "--k", "1"}).out);
  CHECK(one["fraction_real"].get<double>() == doctest::Approx(0.142857).epsilon(1e-6));
  CHECK(one["fraction_real_rational"] == "1/7");
}

TEST_CASE("split keeps the evaluation slices apart from training groups") {
  const auto r = run({"split", "--manifest", fx("manifest.csv")});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["disjoint"] == true);
  CHECK(j["validation"]["real_total_us"] == 360000000);
  CHECK(j["validation"]["synthetic_total_us"] == 320000000);
  CHECK(j["test"]["real_total_us"] == 180000000);
  CHECK(j["test"]["synthetic_total_us"] == 160000000);
  CHECK(j["test"]["fraction_real_rational"] == "9/17");
}

TEST_CASE("eval report matches the oracle") {
  const auto r = run({"eval", "--gt", fx("gt.csv"), "--dets", fx("dets.csv"), "--iou", "0.5,0.75"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["thresholds"].size() == 2);
  REQUIRE(j.contains("AP@50"));
  REQUIRE(j.contains("AP@75"));
  REQUIRE(j.contains("mAP"));

  const auto gts = evkit::decode_annotations(slurp(kFixtures / "gt.csv"));
  const auto dets = evkit::decode_detections(slurp(kFixtures / "dets.csv"));
  double sum50 = 0.0;
  for (int c : {0, 1}) {
    const auto g = oracle::keep_if(gts, [&](const auto& a) { return a.class_id == c; });
    const auto d = oracle::keep_if(dets, [&](const auto& a) { return a.class_id == c; });
    sum50 += *oracle::brute_force_ap(g, d, 0.5);
  }
  CHECK(std::abs(j["AP@50"].get<double>() - sum50 / 2) <= 1e-9);

  const auto coco = Json::parse(run({"eval", "--gt", fx("gt.csv"), "--dets", fx("dets.csv")}).out);
  CHECK(coco["thresholds"].size() == 10);
}

TEST_CASE("gap fit output") {
  const auto dir = scratch("gap");
  const auto r = run({"gap", "--results", fx("results.csv"), "--points-out",
                      (dir / "points.csv").string()});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  const std::vector<double> map{4.26, 6.63, 10.31, 10.61, 12.18, 13.01, 15.69};
  CHECK(std::abs(j["slope"].get<double>() - oracle::ols_slope_over_steps(map, 7)) <= 1e-9);
  CHECK(j["slope_unit"].get<double>() == doctest::Approx(0.1223).epsilon(1e-9));
  CHECK(slurp(dir / "points.csv").rfind("fraction,map\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("render writes one image per window") {
  const auto dir = scratch("render");
  const auto r = run({"render", "--events", fx("events.csv"), "--out-dir", dir.string(), "--width",
                      "4", "--height", "3", "--window-us", "33333", "--start-us", "0", "--end-us",
                      "99999"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "frame_000000.ppm"));
  CHECK(fs::exists(dir / "frame_000002.ppm"));
  CHECK_FALSE(fs::exists(dir / "frame_000003.ppm"));
  CHECK(fs::file_size(dir / "frame_000000.ppm") == std::string("P6\n4 3\n255\n").size() + 36);

  const auto png = run({"render", "--events", fx("events.csv"), "--out-dir", dir.string(),
                        "--width", "4", "--height", "3", "--image-format", "png"});
  REQUIRE(png.code == 0);
  const auto img = evkit::read_image(dir / "frame_000000.png");
  CHECK(img.geometry() == evkit::SensorGeometry{4, 3});
  fs::remove_all(dir);
}

TEST_CASE("EVKIT_THREADS is validated") {
  ::setenv("EVKIT_THREADS", "zero", 1);
  const auto r = run({"eval", "--gt", fx("gt.csv"), "--dets", fx("dets.csv")});
  ::unsetenv("EVKIT_THREADS");
  CHECK(r.code == 2);
}
