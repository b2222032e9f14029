#include "d2dsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace d2dsim {

double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Rect Rect::centered(Vec2 c, double width, double depth) {
  return {c.x - width / 2.0, c.y - depth / 2.0, c.x + width / 2.0, c.y + depth / 2.0};
}

const Trajectory& Scene::trajectory_of(const std::string& id) const {
  auto it = trajectories.find(id);
  if (it == trajectories.end()) throw std::out_of_range("unknown trajectory id: " + id);
  return it->second;
}

namespace {

double segment_length(Vec2 a, Vec2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Walks dist meters along the waypoint polyline (closed when loop).
Vec2 walk(const std::vector<Vec2>& pts, bool closed, double dist) {
  const size_t n = pts.size();
  const size_t segs = closed ? n : n - 1;
  for (size_t i = 0; i < segs; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[(i + 1) % n];
    const double len = segment_length(a, b);
    if (dist <= len) {
      const double f = len > 0.0 ? dist / len : 0.0;
      return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
    }
    dist -= len;
  }
  return closed ? pts[0] : pts.back();
}

}  // namespace

double path_length(const Trajectory& t) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < t.waypoints.size(); ++i)
    len += segment_length(t.waypoints[i], t.waypoints[i + 1]);
  if (t.motion == MotionKind::Loop && t.waypoints.size() >= 2)
    len += segment_length(t.waypoints.back(), t.waypoints.front());
  return len;
}

double trajectory_period(const Trajectory& t) {
  const double len = path_length(t);
  if (t.speed_mps <= 0.0 || len <= 0.0) return 0.0;
  return t.motion == MotionKind::BackAndForth ? 2.0 * len / t.speed_mps : len / t.speed_mps;
}

Vec2 pose_at(const Trajectory& t, double time_s) {
  if (t.waypoints.empty()) throw std::invalid_argument("trajectory has no waypoints");
  if (t.waypoints.size() == 1) return t.waypoints.front();
  const double len = path_length(t);
  if (len <= 0.0) return t.waypoints.front();

  double s = t.speed_mps * (time_s + t.phase_offset_s);
  if (t.motion == MotionKind::BackAndForth) {
    s = std::fmod(s, 2.0 * len);
    if (s < 0.0) s += 2.0 * len;
    if (s > len) s = 2.0 * len - s;  // reflected return leg
    return walk(t.waypoints, false, s);
  }
  s = std::fmod(s, len);
  if (s < 0.0) s += len;
  return walk(t.waypoints, true, s);
}

Vec2 device_pose(const Scene& s, const DeviceSpec& d, double time_s) {
  return pose_at(s.trajectory_of(d.trajectory), time_s);
}

Point3 device_antenna(const Scene& s, const DeviceSpec& d, double time_s) {
  const Vec2 p = device_pose(s, d, time_s);
  return {p.x, p.y, d.antenna_height_m};
}

void scene_state_at(const Scene& s, double time_s, std::vector<PlacedBox>& out) {
  out.clear();
  for (const Obstacle& o : s.obstacles) {
    if (o.trajectory) {
      const Vec2 c = pose_at(s.trajectory_of(*o.trajectory), time_s);
      out.push_back({Rect::centered(c, o.footprint.width(), o.footprint.depth()), o.height_m, -1});
    } else {
      out.push_back({o.footprint, o.height_m, -1});
    }
  }
  for (const DeviceSpec& d : s.devices) {
    const Vec2 c = device_pose(s, d, time_s);
    out.push_back({Rect::centered(c, d.blocker_width_m, d.blocker_depth_m), d.blocker_height_m, d.id});
  }
}

std::vector<PlacedBox> scene_state_at(const Scene& s, double time_s) {
  std::vector<PlacedBox> out;
  scene_state_at(s, time_s, out);
  return out;
}

bool box_blocks_segment(const PlacedBox& box, const Point3& a, const Point3& b) {
  // Slab test for the open segment against the open box
  // (x_min,x_max) x (y_min,y_max) x (0,height). The parameter interval where
  // the segment is strictly inside is open; blocked iff it is non-empty.
  double u0 = 0.0, u1 = 1.0;
  const double lo[3] = {box.footprint.x_min, box.footprint.y_min, 0.0};
  const double hi[3] = {box.footprint.x_max, box.footprint.y_max, box.height};
  const double p[3] = {a.x, a.y, a.z};
  const double d[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (p[k] <= lo[k] || p[k] >= hi[k]) return false;  // never strictly inside this slab
      continue;
    }
    double t0 = (lo[k] - p[k]) / d[k];
    double t1 = (hi[k] - p[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    u0 = std::max(u0, t0);
    u1 = std::min(u1, t1);
    if (u0 >= u1) return false;
  }
  return u0 < u1;
}

bool segment_blocked(const std::vector<PlacedBox>& boxes, const Point3& a, const Point3& b,
                     int exclude_a, int exclude_b) {
  for (const PlacedBox& box : boxes) {
    if (box.owner_device >= 0 &&
        (box.owner_device == exclude_a || box.owner_device == exclude_b))
      continue;
    if (box_blocks_segment(box, a, b)) return true;
  }
  return false;
}

double mobility_period(const Scene& s) {
  std::vector<const Trajectory*> moving;
  for (const Obstacle& o : s.obstacles)
    if (o.trajectory) moving.push_back(&s.trajectory_of(*o.trajectory));
  for (const DeviceSpec& d : s.devices) moving.push_back(&s.trajectory_of(d.trajectory));

  uint64_t lcm_us = 0;
  double max_period = 0.0;
  constexpr uint64_t kCapUs = 1000000ULL * 1000000ULL;  // 1e6 seconds
  for (const Trajectory* t : moving) {
    const double p = trajectory_period(*t);
    if (p <= 0.0) continue;
    max_period = std::max(max_period, p);
    const uint64_t us = static_cast<uint64_t>(std::llround(p * 1e6));
    if (us == 0) continue;
    if (lcm_us == 0) {
      lcm_us = us;
    } else {
      const uint64_t q = lcm_us / std::gcd(lcm_us, us);
      if (q > kCapUs / us) return max_period;  // incommensurate; settle for the largest
      lcm_us = q * us;
    }
    if (lcm_us > kCapUs) return max_period;
  }
  return lcm_us == 0 ? 0.0 : static_cast<double>(lcm_us) * 1e-6;
}

}  // namespace d2dsim
