#include <catch2/catch.hpp>

#include <cmath>

#include "d2dsim/losmap.hpp"
#include "d2dsim/scene.hpp"

using namespace d2dsim;

namespace {

Trajectory line_traj(Vec2 a, Vec2 b, double speed, double phase = 0.0) {
  Trajectory t;
  t.waypoints = {a, b};
  t.speed_mps = speed;
  t.motion = MotionKind::BackAndForth;
  t.phase_offset_s = phase;
  return t;
}

Scene empty_floor() {
  Scene s;
  s.floor_w = 10;
  s.floor_d = 10;
  s.base_station = {5, 0, 3};
  return s;
}

// Oracle: uniform time sweep over one mobility period at 1e-3 resolution.
double sweep_cell_probability(const Scene& s, const Point3& rx, int steps = 1000) {
  const double period = mobility_period(s);
  std::vector<PlacedBox> boxes;
  int clear = 0;
  for (int k = 0; k < steps; ++k) {
    scene_state_at(s, period * k / steps, boxes);
    if (!segment_blocked(boxes, rx, s.base_station)) ++clear;
  }
  return static_cast<double>(clear) / steps;
}

Scene one_crossing_blocker() {
  // A 1x1 box 2.5 m tall shuttles along x at y=3.25 and occludes the ray from
  // cell (4.5, 6.5) to the base station for ~25% of its period.
  Scene s = empty_floor();
  s.trajectories["shuttle"] = line_traj({3.1, 3.25}, {7.4, 3.25}, 0.5);
  Obstacle o;
  o.footprint = Rect::centered({3.1, 3.25}, 1.0, 1.0);
  o.height_m = 2.5;
  o.trajectory = "shuttle";
  s.obstacles.push_back(o);
  return s;
}

}  // namespace

TEST_CASE("map of an empty scene is all ones") {
  const Scene s = empty_floor();
  const LosMap m = build_infra_los_map(s, 1.0, 1.0, 64, 7);
  REQUIRE(m.nx == 10);
  REQUIRE(m.ny == 10);
  for (double p : m.p) CHECK(p == 1.0);
}

TEST_CASE("a static box shadows the cell behind it") {
  Scene s = empty_floor();
  Obstacle o;
  o.footprint = {4.0, 2.0, 6.0, 3.0};
  o.height_m = 3.0;
  s.obstacles.push_back(o);
  const LosMap m = build_infra_los_map(s, 1.0, 1.0, 16, 7);
  // cell (4,6): center (4.5, 6.5), straight behind the box from the station
  CHECK(m.at(4, 6) == 0.0);
  // a corner cell keeps line of sight
  CHECK(m.at(0, 0) == 1.0);
}

TEST_CASE("mobile occlusion matches the time-sweep oracle") {
  const Scene s = one_crossing_blocker();
  const LosMap m = build_infra_los_map(s, 1.0, 1.0, 10000, 42);
  const Point3 rx{4.5, 6.5, 1.0};
  const double truth = sweep_cell_probability(s, rx);
  CHECK(truth == Approx(0.75).epsilon(0.03));
  CHECK(std::fabs(m.at(4, 6) - truth) <= 0.02);
  // every cell agrees with the sweep, not just the designed one
  for (int iy = 0; iy < m.ny; iy += 3) {
    for (int ix = 0; ix < m.nx; ix += 3) {
      const Vec2 c = m.cell_center(ix, iy);
      CHECK(std::fabs(m.at(ix, iy) - sweep_cell_probability(s, {c.x, c.y, 1.0})) <= 0.025);
    }
  }
}

TEST_CASE("doubling the sample count shrinks Monte Carlo noise by about half") {
  const Scene s = one_crossing_blocker();
  const Point3 rx{4.5, 6.5, 1.0};
  const double truth = sweep_cell_probability(s, rx, 4000);
  auto rms = [&](int n_samples) {
    double acc = 0.0;
    const int reps = 24;
    for (int r = 0; r < reps; ++r) {
      const LosMap m = build_infra_los_map(s, 1.0, 1.0, n_samples, 1000 + r);
      const double e = m.at(4, 6) - truth;
      acc += e * e;
    }
    return std::sqrt(acc / reps);
  };
  const double coarse = rms(500);
  const double fine = rms(2000);  // 4x samples -> expect half the rms
  CHECK(coarse < 0.05);
  CHECK(fine < coarse * 0.75);
}

TEST_CASE("removing an obstacle never lowers a cell (shared seed)") {
  const Scene with = one_crossing_blocker();
  Scene without = with;
  without.obstacles.clear();
  const LosMap a = build_infra_los_map(with, 1.0, 1.0, 400, 99);
  const LosMap b = build_infra_los_map(without, 1.0, 1.0, 400, 99);
  for (size_t i = 0; i < a.p.size(); ++i) CHECK(b.p[i] >= a.p[i]);
}

TEST_CASE("all-static scenes collapse to one exact evaluation") {
  Scene s = empty_floor();
  Obstacle o;
  o.footprint = {4.0, 2.0, 6.0, 3.0};
  o.height_m = 3.0;
  s.obstacles.push_back(o);
  const LosMap m = build_infra_los_map(s, 0.5, 1.0, 1, 1);
  for (double p : m.p) CHECK((p == 0.0 || p == 1.0));
}

TEST_CASE("d2d probability: trivial endpoints") {
  Scene s = empty_floor();
  CHECK(los_probability_d2d(s, {2, 5, 1}, {8, 5, 1}, 100, 5) == 1.0);
  Obstacle o;
  o.footprint = {4.0, 4.0, 6.0, 6.0};
  o.height_m = 2.0;
  s.obstacles.push_back(o);
  CHECK(los_probability_d2d(s, {2, 5, 1}, {8, 5, 1}, 100, 5) == 0.0);
}

TEST_CASE("d2d probability is the product of per-object marginals") {
  // Two independent crossing blockers, each clearing the segment 80% of its
  // own period; the exhaustive joint phase sweep is the oracle.
  Scene s = empty_floor();
  s.trajectories["c1"] = line_traj({4.0, 2.5}, {4.0, 7.5}, 0.7);
  s.trajectories["c2"] = line_traj({6.0, 2.5}, {6.0, 7.5}, 0.9);
  for (const char* id : {"c1", "c2"}) {
    Obstacle o;
    o.footprint = Rect::centered({0, 0}, 1.0, 1.0);
    o.height_m = 2.0;
    o.trajectory = id;
    s.obstacles.push_back(o);
  }
  const Point3 a{2, 5, 1};
  const Point3 b{8, 5, 1};

  const double t1 = trajectory_period(s.trajectories.at("c1"));
  const double t2 = trajectory_period(s.trajectories.at("c2"));
  const int grid = 240;
  int clear = 0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      Scene shifted = s;
      shifted.trajectories["c1"].phase_offset_s = t1 * i / grid;
      shifted.trajectories["c2"].phase_offset_s = t2 * j / grid;
      const auto boxes = scene_state_at(shifted, 0.0);
      if (!segment_blocked(boxes, a, b)) ++clear;
    }
  }
  const double joint = static_cast<double>(clear) / (grid * grid);
  CHECK(joint == Approx(0.64).epsilon(0.02));

  const double est = los_probability_d2d(s, a, b, 20000, 17);
  CHECK(std::fabs(est - joint) <= 0.02);
}

TEST_CASE("d2d and infra map agree for a single blocker") {
  const Scene s = one_crossing_blocker();
  const LosMap m = build_infra_los_map(s, 1.0, 1.0, 8000, 3);
  const Vec2 c = m.cell_center(4, 6);
  const double d2d = los_probability_d2d(s, {c.x, c.y, 1.0}, s.base_station, 8000, 4);
  CHECK(std::fabs(d2d - m.at(4, 6)) <= 0.02);
}

TEST_CASE("exact trace is a square wave with closed-form transitions") {
  // Device shuttles along y=5; a tall static box shadows x_d in (2.5, 7.5).
  Scene s = empty_floor();
  s.base_station = {5, 0, 2};
  s.trajectories["lane"] = line_traj({0, 5}, {10, 5}, 1.0);
  Obstacle o;
  o.footprint = {4.0, 2.0, 6.0, 3.0};
  o.height_m = 3.0;
  s.obstacles.push_back(o);
  DeviceSpec d;
  d.id = 0;
  d.trajectory = "lane";
  d.antenna_height_m = 1.0;
  s.devices.push_back(d);

  const LosTrace tr = build_los_trace(s, LinkEnd::dev(0), LinkEnd::bs(), 0.01, 20.0,
                                      false, 1, 1);
  REQUIRE(tr.n() == 2000);
  auto at = [&](double t) { return tr.p[tr.index_of(t)]; };
  CHECK(at(0.0) == 1.0);
  CHECK(at(2.40) == 1.0);
  CHECK(at(2.60) == 0.0);
  CHECK(at(7.40) == 0.0);
  CHECK(at(7.60) == 1.0);
  CHECK(at(12.40) == 1.0);
  CHECK(at(12.60) == 0.0);
  CHECK(at(17.60) == 1.0);
  double mean = 0.0;
  for (double p : tr.p) mean += p;
  mean /= tr.n();
  CHECK(mean == Approx(0.5).epsilon(0.01));
}

TEST_CASE("exact traces shift with a global phase shift") {
  Scene s = empty_floor();
  s.base_station = {5, 0, 2};
  // awkward phase and box size keep blocking boundaries off the sample grid,
  // where rounding could otherwise break the exact identity
  s.trajectories["lane"] = line_traj({0, 5}, {10, 5}, 1.0);
  s.trajectories["cross"] = line_traj({5, 1}, {5, 9}, 2.0, 0.683);
  Obstacle o;
  o.footprint = Rect::centered({0, 0}, 1.17, 1.17);
  o.height_m = 2.5;
  o.trajectory = "cross";
  s.obstacles.push_back(o);
  DeviceSpec d;
  d.id = 0;
  d.trajectory = "lane";
  s.devices.push_back(d);

  const double period = mobility_period(s);  // lcm(20 s, 8 s) = 40 s
  REQUIRE(period == Approx(40.0));
  const double dt = 0.01;
  const LosTrace base = build_los_trace(s, LinkEnd::dev(0), LinkEnd::bs(), dt, period,
                                        false, 1, 1);
  Scene shifted = s;
  const double delta = 10.0;  // multiple of dt
  for (auto& [id, traj] : shifted.trajectories) traj.phase_offset_s += delta;
  const LosTrace moved = build_los_trace(shifted, LinkEnd::dev(0), LinkEnd::bs(), dt, period,
                                         false, 1, 1);
  const int off = static_cast<int>(std::lround(delta / dt));
  for (int i = 0; i < base.n(); ++i)
    CHECK(moved.p[i] == base.p[(i + off) % base.n()]);
}

TEST_CASE("marginalized trace averages unknown blocker phases") {
  Scene s = empty_floor();
  s.base_station = {5, 0, 2};
  s.trajectories["lane"] = line_traj({0, 5}, {10, 5}, 1.0);
  s.trajectories["cross"] = line_traj({5, 1}, {5, 9}, 2.0);
  Obstacle o;
  o.footprint = Rect::centered({0, 0}, 1.2, 1.2);
  o.height_m = 2.5;
  o.trajectory = "cross";
  s.obstacles.push_back(o);
  DeviceSpec d;
  d.id = 0;
  d.trajectory = "lane";
  s.devices.push_back(d);

  const LosTrace tr = build_los_trace(s, LinkEnd::dev(0), LinkEnd::bs(), 0.5, 20.0,
                                      true, 1000, 11);
  // Oracle per sample: sweep the blocker phase at fixed link geometry.
  const double bp = trajectory_period(s.trajectories.at("cross"));
  for (int i = 0; i < tr.n(); i += 5) {
    const double t = i * tr.dt;
    const Point3 pa = device_antenna(s, s.devices[0], t);
    int clear = 0;
    const int steps = 2000;
    for (int k = 0; k < steps; ++k) {
      Scene probe = s;
      probe.trajectories["cross"].phase_offset_s = bp * k / steps;
      const auto boxes = scene_state_at(probe, t);
      if (!segment_blocked(boxes, pa, probe.base_station, 0, -1)) ++clear;
    }
    const double truth = static_cast<double>(clear) / steps;
    CHECK(std::fabs(tr.p[i] - truth) <= 0.05);
  }
}

TEST_CASE("predict_los on a constant trace") {
  LosTrace tr;
  tr.dt = 0.1;
  tr.p.assign(100, 1.0);
  const LosPrediction pr = predict_los(tr, 4.0, 1.0);
  CHECK(pr.p_now == 1.0);
  CHECK(pr.p_horizon == 1.0);
  CHECK(pr.residual_los_s == Approx(tr.period()));
}

TEST_CASE("predict_los on a square wave") {
  LosTrace tr;
  tr.dt = 0.1;
  tr.p.assign(60, 0.0);
  for (int i = 0; i < 30; ++i) tr.p[i] = 1.0;  // LoS on [0,3), off on [3,6)

  const LosPrediction at0 = predict_los(tr, 0.0, 6.0);
  CHECK(at0.p_now == 1.0);
  CHECK(at0.p_horizon == Approx(0.5));  // half LoS, half not
  CHECK(at0.residual_los_s == Approx(3.0));  // drop edge 3 s ahead

  const LosPrediction at45 = predict_los(tr, 4.5, 1.0);
  CHECK(at45.p_now == 0.0);
  CHECK(at45.residual_los_s == Approx(1.5));  // recovery edge

  // horizons longer than the period wrap cleanly
  const LosPrediction wide = predict_los(tr, 1.0, 12.0);
  CHECK(wide.p_horizon == Approx(0.5));
}

TEST_CASE("observation updates blend at 0.2 and converge") {
  LosTrace tr;
  tr.dt = 0.1;
  tr.p.assign(50, 0.5);
  update_trace_from_observations(tr, {{1.0, true}});
  CHECK(tr.p[10] == Approx(0.6).epsilon(1e-12));
  for (int k = 0; k < 19; ++k) update_trace_from_observations(tr, {{1.0, true}});
  CHECK(tr.p[10] == Approx(1.0 - 0.5 * std::pow(0.8, 20)).epsilon(1e-9));
  CHECK(tr.p[10] >= 0.98);
  CHECK(tr.p[11] == 0.5);  // neighbours untouched
}

TEST_CASE("export formats are well formed") {
  const Scene s = one_crossing_blocker();
  const LosMap m = build_infra_los_map(s, 2.0, 1.0, 32, 1);
  const std::string csv = losmap_to_csv(m);
  CHECK(csv.rfind("x_m,y_m,p\n", 0) == 0);
  size_t rows = static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(rows == m.p.size() + 1);
  const std::string svg = losmap_to_svg(m);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  LosTrace tr;
  tr.dt = 0.5;
  tr.p = {1.0, 0.0, 1.0};
  CHECK(trace_to_csv(tr) == "t_s,p\n0,1\n0.5,0\n1,1\n");
  const std::string tsvg = traces_to_svg({{"device 0", tr}});
  CHECK(tsvg.find("device 0") != std::string::npos);
}

TEST_CASE("invalid sampling arguments are rejected") {
  const Scene s = empty_floor();
  CHECK_THROWS_AS(build_infra_los_map(s, 0.0, 1.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_infra_los_map(s, 1.0, 1.0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(los_probability_d2d(s, {0, 0, 1}, {1, 1, 1}, 0, 1), std::invalid_argument);
}
