#include <catch2/catch.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "d2dsim/commands.hpp"
#include "d2dsim/report.hpp"
#include "d2dsim/scenario.hpp"

using namespace d2dsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("d2dsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

json default_json() { return json::parse(scenario_to_json(default_scenario())); }

void expect_rejects(const json& j, const std::string& needle) {
  try {
    scenario_from_json(j.dump());
    FAIL("expected rejection mentioning \"" << needle << "\"");
  } catch (const std::invalid_argument& e) {
    CHECK_THAT(e.what(), Catch::Matchers::Contains(needle));
  }
}

}  // namespace

TEST_CASE("the default deployment is internally consistent") {
  const SimConfig cfg = default_scenario();
  CHECK(cfg.scene.devices.size() == 16);
  CHECK(cfg.scene.obstacles.size() == 2);
  CHECK(cfg.infra.carrier_ghz == 28.0);
  CHECK(cfg.infra.bandwidth_hz == 800e6);
  CHECK(cfg.d2d.carrier_ghz == 60.0);
  CHECK(cfg.traffic.bitrate_bps == 300e6);

  // robots walk at 3 km/h on lanes spaced 1 m apart, centred on the floor
  std::vector<double> xs;
  for (const DeviceSpec& d : cfg.scene.devices) {
    const Trajectory& t = cfg.scene.trajectory_of(d.trajectory);
    CHECK(t.speed_mps == Approx(5.0 / 6.0));
    CHECK(t.waypoints[0].x == t.waypoints[1].x);
    xs.push_back(t.waypoints[0].x);
  }
  std::sort(xs.begin(), xs.end());
  for (size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == Approx(1.0));
  CHECK(xs.front() == Approx(cfg.scene.floor_w - xs.back()));

  // both belts block the lanes but sit below the base station mount
  for (const Obstacle& ob : cfg.scene.obstacles) {
    CHECK_FALSE(ob.trajectory.has_value());
    CHECK(ob.height_m < cfg.scene.base_station.z);
    CHECK(ob.footprint.x_max - ob.footprint.x_min == Approx(12.0));
    CHECK(ob.footprint.y_max - ob.footprint.y_min == Approx(1.0));
  }
}

TEST_CASE("scenario JSON round-trips byte for byte") {
  const std::string a = scenario_to_json(default_scenario());
  const std::string b = scenario_to_json(scenario_from_json(a));
  CHECK(a == b);
  const std::string c = scenario_to_json(scenario_from_json(b));
  CHECK(b == c);
}

TEST_CASE("unknown keys are rejected with their full path") {
  json j = default_json();
  j["scene"]["floor_area"] = 1.0;
  expect_rejects(j, "scene.floor_area");

  j = default_json();
  j["scene"]["devices"][0]["colour"] = "red";
  expect_rejects(j, "scene.devices[0].colour");

  j = default_json();
  j["d2d_radio"]["beam_width"] = 3.0;
  expect_rejects(j, "d2d_radio.beam_width");

  j = default_json();
  j["verbose"] = true;
  expect_rejects(j, "scenario.verbose");
}

TEST_CASE("missing and mistyped fields name the offending key") {
  json j = default_json();
  j.erase("traffic");
  expect_rejects(j, "scenario.traffic");

  j = default_json();
  j["scene"]["floor_w_m"] = "wide";
  expect_rejects(j, "scene.floor_w_m");

  j = default_json();
  j["infra_radio"]["nlos_mode"] = "mixed";
  expect_rejects(j, "infra_radio.nlos_mode");

  j = default_json();
  j["strategy"] = "greedy";
  expect_rejects(j, "strategy");

  expect_rejects(json::parse("{}"), "scene");
  CHECK_THROWS_AS(scenario_from_json("{not json"), std::invalid_argument);
}

TEST_CASE("scene invariants are enforced") {
  json j = default_json();
  j["scene"]["devices"][1]["id"] = 0;
  expect_rejects(j, "duplicate");

  j = default_json();
  j["scene"]["devices"][0]["trajectory"] = "loop99";
  expect_rejects(j, "loop99");

  j = default_json();
  j["scene"]["trajectories"]["lane00"]["waypoints_m"][0][0] = -3.0;
  expect_rejects(j, "waypoints_m[0]");

  j = default_json();
  j["tick_s"] = 0.02;  // larger than the 10 ms interarrival
  expect_rejects(j, "interarrival");

  j = default_json();
  j["scene"]["base_station_m"][1] = 99.0;
  expect_rejects(j, "base_station_m");

  j = default_json();
  j["policy"]["theta_push"] = 1.5;
  expect_rejects(j, "theta_push");

  j = default_json();
  j["scene"]["obstacles"][0]["height_m"] = 0.0;
  expect_rejects(j, "obstacles[0].height_m");
}

TEST_CASE("the probe variant keeps the hall but swaps the fleet") {
  const SimConfig cfg = three_probe_scenario();
  CHECK(cfg.scene.devices.size() == 3);
  CHECK(cfg.scene.obstacles.size() == 2);
  CHECK_FALSE(cfg.randomize_device_phases);
  std::vector<double> phases;
  for (const DeviceSpec& d : cfg.scene.devices) {
    const Trajectory& t = cfg.scene.trajectory_of(d.trajectory);
    CHECK(t.waypoints[0].x == 9.0);
    phases.push_back(t.phase_offset_s);
  }
  std::sort(phases.begin(), phases.end());
  CHECK(phases[0] == Approx(0.0));
  CHECK(phases[1] == Approx(7.2));
  CHECK(phases[2] == Approx(14.4));
  CHECK_NOTHROW(scenario_from_json(scenario_to_json(cfg)));
}

TEST_CASE("generate-default writes a loadable scenario") {
  const fs::path dir = fresh_dir("gen");
  const fs::path path = dir / "scenario.json";
  std::string out;
  CHECK(cli({"generate-default", "--out", path.string()}, &out) == 0);
  CHECK(out.find("scenario.json") != std::string::npos);
  const SimConfig cfg = scenario_from_json(slurp(path));
  CHECK(cfg.scene.devices.size() == 16);
  CHECK(cfg.infra.carrier_ghz == 28.0);
}

TEST_CASE("run performs the requested sweep deterministically") {
  const fs::path dir = fresh_dir("run");
  const fs::path sc = dir / "scenario.json";
  REQUIRE(cli({"generate-default", "--out", sc.string()}) == 0);

  // shrink the horizon so this stays a unit test
  json j = json::parse(slurp(sc));
  j["duration_s"] = 2.0;
  std::ofstream(sc) << j.dump();

  auto args = [&](const std::string& out_dir) {
    return std::vector<std::string>{
        "run",   "--scenario", sc.string(), "--strategies", "predictive,direct",
        "--interarrival-ms", "10,20",     "--runs", "2",  "--out", out_dir};
  };
  REQUIRE(cli(args((dir / "a").string())) == 0);
  REQUIRE(cli(args((dir / "b").string())) == 0);

  const std::string runs = slurp(dir / "a" / "runs.csv");
  CHECK(runs == slurp(dir / "b" / "runs.csv"));
  CHECK(slurp(dir / "a" / "aggregate.csv") == slurp(dir / "b" / "aggregate.csv"));

  // 2 strategies x 2 interarrival points x 2 runs, plus the header
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 9);
  CHECK(runs.rfind("strategy,interarrival_ms,run,seed,n_generated,n_delivered,"
                   "drop_blockage,drop_rate,mean_delay_ms",
                   0) == 0);

  const auto cells = parse_aggregate_csv(slurp(dir / "a" / "aggregate.csv"));
  REQUIRE(cells.size() == 4);
  for (const AggregateRow& c : cells) CHECK(c.runs == 2);
  CHECK(fs::exists(dir / "a" / "drop_blockage.svg"));
  CHECK(fs::exists(dir / "a" / "drop_rate.svg"));
  CHECK(fs::exists(dir / "a" / "delay.svg"));
}

TEST_CASE("losmap emits the heat map and per-device traces") {
  const fs::path dir = fresh_dir("losmap");
  const fs::path sc = dir / "scenario.json";
  REQUIRE(cli({"generate-default", "--out", sc.string()}) == 0);
  REQUIRE(cli({"losmap", "--scenario", sc.string(), "--out", (dir / "maps").string(),
               "--grid-res", "1.0", "--samples", "200"}) == 0);

  const std::string map_csv = slurp(dir / "maps" / "losmap.csv");
  CHECK(map_csv.rfind("x_m,y_m,p", 0) == 0);
  // 18 x 10 m floor at 1 m cells
  CHECK(std::count(map_csv.begin(), map_csv.end(), '\n') == 181);

  const std::string traces = slurp(dir / "maps" / "traces.csv");
  CHECK(traces.rfind("t_s,dev0,dev1", 0) == 0);
  CHECK(fs::exists(dir / "maps" / "losmap.svg"));
  CHECK(fs::exists(dir / "maps" / "traces.svg"));
}

TEST_CASE("usage and failure exit codes") {
  std::string err;
  CHECK(cli({}, nullptr, &err) == 2);
  CHECK(err.find("usage") != std::string::npos);
  CHECK(cli({"frobnicate"}, nullptr, &err) == 2);
  CHECK(cli({"help"}) == 0);
  CHECK(cli({"run", "--out", "somewhere"}, nullptr, &err) == 2);  // missing --scenario

  const fs::path dir = fresh_dir("cli_err");
  CHECK(cli({"run", "--scenario", (dir / "nope.json").string(), "--out", dir.string()},
            nullptr, &err) == 1);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"scene\": 3}";
  CHECK(cli({"run", "--scenario", bad.string(), "--out", dir.string()}, nullptr, &err) == 2);
  CHECK(err.find("scene") != std::string::npos);

  const fs::path good = dir / "good.json";
  REQUIRE(cli({"generate-default", "--out", good.string()}) == 0);
  CHECK(cli({"run", "--scenario", good.string(), "--out", dir.string(), "--runs", "0"},
            nullptr, &err) == 2);
  CHECK(cli({"run", "--scenario", good.string(), "--out", dir.string(),
             "--interarrival-ms", "10,zap"},
            nullptr, &err) == 2);
  CHECK(cli({"run", "--scenario", good.string(), "--out", dir.string(), "--strategies",
             "direct,direct"},
            nullptr, &err) == 2);
  CHECK(cli({"losmap", "--scenario", good.string(), "--out", dir.string(), "--grid-res",
             "-1"},
            nullptr, &err) == 2);
}
