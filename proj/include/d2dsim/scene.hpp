#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace d2dsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Point3& a, const Point3& b);

// Axis-aligned rectangle in floor coordinates, meters.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double depth() const { return y_max - y_min; }
  Vec2 center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }
  static Rect centered(Vec2 c, double width, double depth);
};

enum class MotionKind { BackAndForth, Loop };

struct Trajectory {
  std::vector<Vec2> waypoints;  // at least 2, consecutive points distinct
  double speed_mps = 0.0;       // > 0
  MotionKind motion = MotionKind::BackAndForth;
  double phase_offset_s = 0.0;
};

// One-way polyline length; for Loop the closing segment back to the first
// waypoint is included so motion stays continuous.
double path_length(const Trajectory& t);
double trajectory_period(const Trajectory& t);
Vec2 pose_at(const Trajectory& t, double time_s);

struct Obstacle {
  Rect footprint;  // mobile: gives the box dimensions, placed centered on the pose
  double height_m = 0.0;
  std::optional<std::string> trajectory;  // set => mobile
};

struct DeviceSpec {
  int id = 0;
  std::string trajectory;
  double antenna_height_m = 1.0;
  double blocker_width_m = 0.5;
  double blocker_depth_m = 0.5;
  double blocker_height_m = 1.0;
};

struct Scene {
  double floor_w = 0.0;
  double floor_d = 0.0;
  Point3 base_station;
  std::map<std::string, Trajectory> trajectories;
  std::vector<Obstacle> obstacles;
  std::vector<DeviceSpec> devices;

  const Trajectory& trajectory_of(const std::string& id) const;
};

// An extruded box occupying footprint x (0, height). owner_device >= 0 tags
// device body boxes so a link's own endpoints can be excluded.
struct PlacedBox {
  Rect footprint;
  double height = 0.0;
  int owner_device = -1;
};

Vec2 device_pose(const Scene& s, const DeviceSpec& d, double time_s);
Point3 device_antenna(const Scene& s, const DeviceSpec& d, double time_s);

// All boxes present at time_s: static obstacles, mobile obstacles centered on
// their trajectory pose, device blocker boxes centered on the device pose.
void scene_state_at(const Scene& s, double time_s, std::vector<PlacedBox>& out);
std::vector<PlacedBox> scene_state_at(const Scene& s, double time_s);

// True when the open segment (a,b) intersects a box interior. Grazing contact
// with a face (e.g. the segment touching the top plane of a box) is not a
// block. Boxes owned by exclude_a/exclude_b are skipped; an endpoint's own
// body never occludes its link.
bool box_blocks_segment(const PlacedBox& box, const Point3& a, const Point3& b);
bool segment_blocked(const std::vector<PlacedBox>& boxes, const Point3& a, const Point3& b,
                     int exclude_a = -1, int exclude_b = -1);

// Common period of every trajectory referenced by a mobile obstacle or a
// device: least common multiple after rounding periods to 1 us. Returns 0 for
// all-static scenes. Incommensurate periods fall back to the largest single
// period once the LCM exceeds ~11.5 days in us.
double mobility_period(const Scene& s);

}  // namespace d2dsim
