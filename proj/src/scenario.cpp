#include "d2dsim/scenario.hpp"

#include <cstdio>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "d2dsim/report.hpp"

namespace d2dsim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

void check_keys(const json& o, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!o.is_object()) fail(path, "expected an object");
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(path + "." + it.key(), "unknown key");
  }
}

const json& member(const json& o, const std::string& path, const char* key) {
  auto it = o.find(key);
  if (it == o.end()) fail(path + "." + key, "missing");
  return *it;
}

double num(const json& o, const std::string& path, const char* key) {
  const json& v = member(o, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int64_t integer(const json& o, const std::string& path, const char* key) {
  const json& v = member(o, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int64_t>();
}

bool boolean(const json& o, const std::string& path, const char* key) {
  const json& v = member(o, path, key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string str(const json& o, const std::string& path, const char* key) {
  const json& v = member(o, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Trajectory trajectory_from(const json& o, const std::string& path) {
  check_keys(o, path, {"waypoints_m", "speed_mps", "motion", "phase_offset_s"});
  Trajectory t;
  const json& wps = member(o, path, "waypoints_m");
  if (!wps.is_array() || wps.size() < 2) fail(path + ".waypoints_m", "need at least two points");
  for (size_t i = 0; i < wps.size(); ++i) {
    const json& p = wps[i];
    const std::string pp = path + ".waypoints_m[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      fail(pp, "expected [x, y]");
    t.waypoints.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  t.speed_mps = num(o, path, "speed_mps");
  const std::string motion = str(o, path, "motion");
  if (motion == "back_and_forth")
    t.motion = MotionKind::BackAndForth;
  else if (motion == "loop")
    t.motion = MotionKind::Loop;
  else
    fail(path + ".motion", "expected \"back_and_forth\" or \"loop\"");
  t.phase_offset_s = num(o, path, "phase_offset_s");
  return t;
}

json trajectory_to(const Trajectory& t) {
  json o;
  json wps = json::array();
  for (const Vec2& p : t.waypoints) wps.push_back({p.x, p.y});
  o["waypoints_m"] = wps;
  o["speed_mps"] = t.speed_mps;
  o["motion"] = t.motion == MotionKind::Loop ? "loop" : "back_and_forth";
  o["phase_offset_s"] = t.phase_offset_s;
  return o;
}

Rect rect_from(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) fail(path, "expected [x_min, y_min, x_max, y_max]");
  for (size_t i = 0; i < 4; ++i)
    if (!v[i].is_number()) fail(path, "expected [x_min, y_min, x_max, y_max]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
}

Scene scene_from(const json& o, const std::string& path) {
  check_keys(o, path,
             {"floor_w_m", "floor_d_m", "base_station_m", "trajectories", "obstacles",
              "devices"});
  Scene s;
  s.floor_w = num(o, path, "floor_w_m");
  s.floor_d = num(o, path, "floor_d_m");
  const json& bs = member(o, path, "base_station_m");
  if (!bs.is_array() || bs.size() != 3 || !bs[0].is_number() || !bs[1].is_number() ||
      !bs[2].is_number())
    fail(path + ".base_station_m", "expected [x, y, z]");
  s.base_station = {bs[0].get<double>(), bs[1].get<double>(), bs[2].get<double>()};

  const json& trajs = member(o, path, "trajectories");
  if (!trajs.is_object()) fail(path + ".trajectories", "expected an object");
  for (auto it = trajs.begin(); it != trajs.end(); ++it)
    s.trajectories[it.key()] =
        trajectory_from(it.value(), path + ".trajectories." + it.key());

  const json& obs = member(o, path, "obstacles");
  if (!obs.is_array()) fail(path + ".obstacles", "expected an array");
  for (size_t i = 0; i < obs.size(); ++i) {
    const std::string op = path + ".obstacles[" + std::to_string(i) + "]";
    check_keys(obs[i], op, {"footprint_m", "height_m", "trajectory"});
    Obstacle ob;
    ob.footprint = rect_from(member(obs[i], op, "footprint_m"), op + ".footprint_m");
    ob.height_m = num(obs[i], op, "height_m");
    if (obs[i].contains("trajectory")) ob.trajectory = str(obs[i], op, "trajectory");
    s.obstacles.push_back(ob);
  }

  const json& devs = member(o, path, "devices");
  if (!devs.is_array()) fail(path + ".devices", "expected an array");
  for (size_t i = 0; i < devs.size(); ++i) {
    const std::string dp = path + ".devices[" + std::to_string(i) + "]";
    check_keys(devs[i], dp,
               {"id", "trajectory", "antenna_height_m", "blocker_width_m",
                "blocker_depth_m", "blocker_height_m"});
    DeviceSpec d;
    d.id = static_cast<int>(integer(devs[i], dp, "id"));
    d.trajectory = str(devs[i], dp, "trajectory");
    d.antenna_height_m = num(devs[i], dp, "antenna_height_m");
    d.blocker_width_m = num(devs[i], dp, "blocker_width_m");
    d.blocker_depth_m = num(devs[i], dp, "blocker_depth_m");
    d.blocker_height_m = num(devs[i], dp, "blocker_height_m");
    s.devices.push_back(d);
  }
  return s;
}

json scene_to(const Scene& s) {
  json o;
  o["floor_w_m"] = s.floor_w;
  o["floor_d_m"] = s.floor_d;
  o["base_station_m"] = {s.base_station.x, s.base_station.y, s.base_station.z};
  json trajs = json::object();
  for (const auto& [name, t] : s.trajectories) trajs[name] = trajectory_to(t);
  o["trajectories"] = trajs;
  json obs = json::array();
  for (const Obstacle& ob : s.obstacles) {
    json e;
    e["footprint_m"] = {ob.footprint.x_min, ob.footprint.y_min, ob.footprint.x_max,
                        ob.footprint.y_max};
    e["height_m"] = ob.height_m;
    if (ob.trajectory) e["trajectory"] = *ob.trajectory;
    obs.push_back(e);
  }
  o["obstacles"] = obs;
  json devs = json::array();
  for (const DeviceSpec& d : s.devices) {
    json e;
    e["id"] = d.id;
    e["trajectory"] = d.trajectory;
    e["antenna_height_m"] = d.antenna_height_m;
    e["blocker_width_m"] = d.blocker_width_m;
    e["blocker_depth_m"] = d.blocker_depth_m;
    e["blocker_height_m"] = d.blocker_height_m;
    devs.push_back(e);
  }
  o["devices"] = devs;
  return o;
}

RadioParams radio_from(const json& o, const std::string& path) {
  check_keys(o, path,
             {"carrier_ghz", "bandwidth_hz", "tx_power_dbm", "tx_gain_dbi", "rx_gain_dbi",
              "noise_figure_db", "rate_cap_bps", "max_range_m", "setup_time_s",
              "nlos_mode"});
  RadioParams p;
  p.carrier_ghz = num(o, path, "carrier_ghz");
  p.bandwidth_hz = num(o, path, "bandwidth_hz");
  p.tx_power_dbm = num(o, path, "tx_power_dbm");
  p.tx_gain_dbi = num(o, path, "tx_gain_dbi");
  p.rx_gain_dbi = num(o, path, "rx_gain_dbi");
  p.noise_figure_db = num(o, path, "noise_figure_db");
  if (o.contains("rate_cap_bps")) p.rate_cap_bps = num(o, path, "rate_cap_bps");
  if (o.contains("max_range_m")) p.max_range_m = num(o, path, "max_range_m");
  p.setup_time_s = num(o, path, "setup_time_s");
  const std::string mode = str(o, path, "nlos_mode");
  if (mode == "soft")
    p.nlos_mode = NlosMode::Soft;
  else if (mode == "hard")
    p.nlos_mode = NlosMode::Hard;
  else
    fail(path + ".nlos_mode", "expected \"soft\" or \"hard\"");
  return p;
}

json radio_to(const RadioParams& p) {
  json o;
  o["carrier_ghz"] = p.carrier_ghz;
  o["bandwidth_hz"] = p.bandwidth_hz;
  o["tx_power_dbm"] = p.tx_power_dbm;
  o["tx_gain_dbi"] = p.tx_gain_dbi;
  o["rx_gain_dbi"] = p.rx_gain_dbi;
  o["noise_figure_db"] = p.noise_figure_db;
  if (p.rate_cap_bps) o["rate_cap_bps"] = *p.rate_cap_bps;
  if (p.max_range_m) o["max_range_m"] = *p.max_range_m;
  o["setup_time_s"] = p.setup_time_s;
  o["nlos_mode"] = p.nlos_mode == NlosMode::Hard ? "hard" : "soft";
  return o;
}

void validate_radio(const RadioParams& p, const std::string& path) {
  if (p.carrier_ghz <= 0.0) fail(path + ".carrier_ghz", "must be positive");
  if (p.bandwidth_hz <= 0.0) fail(path + ".bandwidth_hz", "must be positive");
  if (p.noise_figure_db < 0.0) fail(path + ".noise_figure_db", "must be non-negative");
  if (p.rate_cap_bps && *p.rate_cap_bps <= 0.0)
    fail(path + ".rate_cap_bps", "must be positive");
  if (p.max_range_m && *p.max_range_m <= 0.0) fail(path + ".max_range_m", "must be positive");
  if (p.setup_time_s < 0.0) fail(path + ".setup_time_s", "must be non-negative");
}

void validate(const SimConfig& cfg) {
  const Scene& s = cfg.scene;
  if (s.floor_w <= 0.0 || s.floor_d <= 0.0) fail("scene", "floor dimensions must be positive");
  const Point3& bs = s.base_station;
  if (bs.x < 0.0 || bs.x > s.floor_w || bs.y < 0.0 || bs.y > s.floor_d || bs.z <= 0.0)
    fail("scene.base_station_m", "must lie inside the floor with positive height");

  for (const auto& [name, t] : s.trajectories) {
    const std::string path = "scene.trajectories." + name;
    if (t.speed_mps <= 0.0) fail(path + ".speed_mps", "must be positive");
    if (t.phase_offset_s < 0.0) fail(path + ".phase_offset_s", "must be non-negative");
    if (t.waypoints.size() < 2) fail(path + ".waypoints_m", "need at least two points");
    for (size_t i = 0; i < t.waypoints.size(); ++i) {
      const Vec2& p = t.waypoints[i];
      if (p.x < 0.0 || p.x > s.floor_w || p.y < 0.0 || p.y > s.floor_d)
        fail(path + ".waypoints_m[" + std::to_string(i) + "]", "outside the floor");
      if (i > 0 && t.waypoints[i - 1].x == p.x && t.waypoints[i - 1].y == p.y)
        fail(path + ".waypoints_m[" + std::to_string(i) + "]",
             "coincides with the previous point");
    }
  }

  for (size_t i = 0; i < s.obstacles.size(); ++i) {
    const Obstacle& ob = s.obstacles[i];
    const std::string path = "scene.obstacles[" + std::to_string(i) + "]";
    if (ob.height_m <= 0.0) fail(path + ".height_m", "must be positive");
    const Rect& r = ob.footprint;
    if (r.x_min >= r.x_max || r.y_min >= r.y_max)
      fail(path + ".footprint_m", "must have positive extent");
    if (ob.trajectory) {
      if (!s.trajectories.count(*ob.trajectory))
        fail(path + ".trajectory", "references unknown trajectory \"" + *ob.trajectory + "\"");
    } else if (r.x_min < 0.0 || r.y_min < 0.0 || r.x_max > s.floor_w || r.y_max > s.floor_d) {
      fail(path + ".footprint_m", "outside the floor");
    }
  }

  std::set<int> ids;
  for (size_t i = 0; i < s.devices.size(); ++i) {
    const DeviceSpec& d = s.devices[i];
    const std::string path = "scene.devices[" + std::to_string(i) + "]";
    if (d.id < 0) fail(path + ".id", "must be non-negative");
    if (!ids.insert(d.id).second) fail(path + ".id", "duplicate id");
    if (!s.trajectories.count(d.trajectory))
      fail(path + ".trajectory", "references unknown trajectory \"" + d.trajectory + "\"");
    if (d.antenna_height_m <= 0.0) fail(path + ".antenna_height_m", "must be positive");
    if (d.blocker_width_m <= 0.0 || d.blocker_depth_m <= 0.0 || d.blocker_height_m <= 0.0)
      fail(path, "blocker dimensions must be positive");
  }

  validate_radio(cfg.infra, "infra_radio");
  validate_radio(cfg.d2d, "d2d_radio");

  const PolicyParams& pol = cfg.policy;
  if (pol.theta_push < 0.0 || pol.theta_push > 1.0) fail("policy.theta_push", "must be in [0, 1]");
  if (pol.theta_block < 0.0 || pol.theta_block > 1.0)
    fail("policy.theta_block", "must be in [0, 1]");
  if (pol.delta < 0.0) fail("policy.delta", "must be non-negative");
  if (pol.horizon_s <= 0.0) fail("policy.horizon_s", "must be positive");
  if (pol.redecision_s <= 0.0) fail("policy.redecision_s", "must be positive");
  if (pol.cache_capacity_bits <= 0.0) fail("policy.cache_capacity_bits", "must be positive");

  if (cfg.traffic.interarrival_s <= 0.0) fail("traffic.interarrival_s", "must be positive");
  if (cfg.traffic.bitrate_bps <= 0.0) fail("traffic.bitrate_bps", "must be positive");
  if (cfg.traffic.deadline_s <= 0.0) fail("traffic.deadline_s", "must be positive");

  if (cfg.duration_s <= 0.0) fail("duration_s", "must be positive");
  if (cfg.tick_s <= 0.0) fail("tick_s", "must be positive");
  if (cfg.traffic.interarrival_s < cfg.tick_s)
    fail("traffic.interarrival_s", "must be at least one tick");
}

}  // namespace

SimConfig scenario_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario is not valid JSON: ") + e.what());
  }
  check_keys(root, "scenario",
             {"scene", "infra_radio", "d2d_radio", "policy", "traffic", "strategy",
              "duration_s", "tick_s", "seed", "randomize_device_phases"});
  SimConfig cfg;
  cfg.scene = scene_from(member(root, "scenario", "scene"), "scene");
  cfg.infra = radio_from(member(root, "scenario", "infra_radio"), "infra_radio");
  cfg.d2d = radio_from(member(root, "scenario", "d2d_radio"), "d2d_radio");

  const json& pol = member(root, "scenario", "policy");
  check_keys(pol, "policy",
             {"theta_push", "delta", "horizon_s", "theta_block", "redecision_s",
              "cache_capacity_bits"});
  cfg.policy.theta_push = num(pol, "policy", "theta_push");
  cfg.policy.delta = num(pol, "policy", "delta");
  cfg.policy.horizon_s = num(pol, "policy", "horizon_s");
  cfg.policy.theta_block = num(pol, "policy", "theta_block");
  cfg.policy.redecision_s = num(pol, "policy", "redecision_s");
  cfg.policy.cache_capacity_bits = num(pol, "policy", "cache_capacity_bits");

  const json& traf = member(root, "scenario", "traffic");
  check_keys(traf, "traffic", {"interarrival_s", "bitrate_bps", "deadline_s"});
  cfg.traffic.interarrival_s = num(traf, "traffic", "interarrival_s");
  cfg.traffic.bitrate_bps = num(traf, "traffic", "bitrate_bps");
  cfg.traffic.deadline_s = num(traf, "traffic", "deadline_s");

  try {
    cfg.strategy = parse_strategy(str(root, "scenario", "strategy"));
  } catch (const std::invalid_argument&) {
    fail("strategy", "expected \"direct\", \"storage\", or \"predictive\"");
  }
  cfg.duration_s = num(root, "scenario", "duration_s");
  cfg.tick_s = num(root, "scenario", "tick_s");
  const int64_t seed = integer(root, "scenario", "seed");
  if (seed < 0) fail("seed", "must be non-negative");
  cfg.seed = static_cast<uint64_t>(seed);
  cfg.randomize_device_phases = boolean(root, "scenario", "randomize_device_phases");

  validate(cfg);
  return cfg;
}

std::string scenario_to_json(const SimConfig& cfg) {
  json root;
  root["scene"] = scene_to(cfg.scene);
  root["infra_radio"] = radio_to(cfg.infra);
  root["d2d_radio"] = radio_to(cfg.d2d);
  json pol;
  pol["theta_push"] = cfg.policy.theta_push;
  pol["delta"] = cfg.policy.delta;
  pol["horizon_s"] = cfg.policy.horizon_s;
  pol["theta_block"] = cfg.policy.theta_block;
  pol["redecision_s"] = cfg.policy.redecision_s;
  pol["cache_capacity_bits"] = cfg.policy.cache_capacity_bits;
  root["policy"] = pol;
  json traf;
  traf["interarrival_s"] = cfg.traffic.interarrival_s;
  traf["bitrate_bps"] = cfg.traffic.bitrate_bps;
  traf["deadline_s"] = cfg.traffic.deadline_s;
  root["traffic"] = traf;
  root["strategy"] = strategy_name(cfg.strategy);
  root["duration_s"] = cfg.duration_s;
  root["tick_s"] = cfg.tick_s;
  root["seed"] = cfg.seed;
  root["randomize_device_phases"] = cfg.randomize_device_phases;
  return root.dump(2) + "\n";
}

SimConfig default_scenario() {
  SimConfig cfg;
  Scene& s = cfg.scene;
  s.floor_w = 18.0;
  s.floor_d = 10.0;
  s.base_station = {9.0, 0.0, 3.0};
  // two conveyor belts crossing every patrol lane
  s.obstacles.push_back({{3.0, 3.5, 15.0, 4.5}, 1.2, std::nullopt});
  s.obstacles.push_back({{3.0, 6.5, 15.0, 7.5}, 1.2, std::nullopt});

  const double walking = 5.0 / 6.0;  // 3 km/h
  for (int i = 0; i < 16; ++i) {
    const double x = 1.5 + static_cast<double>(i);
    char name[8];
    std::snprintf(name, sizeof name, "lane%02d", i);
    Trajectory t;
    t.waypoints = {{x, 0.5}, {x, 9.5}};
    t.speed_mps = walking;
    s.trajectories[name] = t;
    DeviceSpec d;
    d.id = i;
    d.trajectory = name;
    s.devices.push_back(d);
  }

  cfg.infra.carrier_ghz = 28.0;
  cfg.infra.bandwidth_hz = 800e6;
  cfg.infra.tx_power_dbm = 23.0;
  cfg.infra.tx_gain_dbi = 5.0;
  cfg.infra.rx_gain_dbi = 15.0;
  cfg.infra.noise_figure_db = 7.0;
  cfg.infra.nlos_mode = NlosMode::Hard;

  cfg.d2d.carrier_ghz = 60.0;
  cfg.d2d.bandwidth_hz = 2.16e9;
  cfg.d2d.tx_power_dbm = 23.0;
  cfg.d2d.tx_gain_dbi = 10.0;
  cfg.d2d.rx_gain_dbi = 10.0;
  cfg.d2d.noise_figure_db = 7.0;
  cfg.d2d.rate_cap_bps = 10e9;
  cfg.d2d.max_range_m = 100.0;
  cfg.d2d.setup_time_s = 1e-4;
  cfg.d2d.nlos_mode = NlosMode::Hard;

  cfg.traffic.interarrival_s = 0.010;
  cfg.traffic.bitrate_bps = 300e6;
  cfg.traffic.deadline_s = 1.5;
  cfg.strategy = Strategy::Predictive;
  cfg.duration_s = 60.0;
  cfg.tick_s = 1e-3;
  cfg.seed = 1;
  cfg.randomize_device_phases = true;
  return cfg;
}

SimConfig three_probe_scenario() {
  SimConfig cfg = default_scenario();
  cfg.scene.trajectories.clear();
  cfg.scene.devices.clear();

  Trajectory lane;
  lane.waypoints = {{9.0, 0.5}, {9.0, 9.5}};
  lane.speed_mps = 5.0 / 6.0;
  const double period = trajectory_period(lane);  // 21.6 s
  for (int i = 0; i < 3; ++i) {
    Trajectory t = lane;
    t.phase_offset_s = period * static_cast<double>(i) / 3.0;
    const std::string name = "probe" + std::to_string(i);
    cfg.scene.trajectories[name] = t;
    DeviceSpec d;
    d.id = i;
    d.trajectory = name;
    cfg.scene.devices.push_back(d);
  }
  cfg.randomize_device_phases = false;
  return cfg;
}

}  // namespace d2dsim
