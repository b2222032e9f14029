#include "d2dsim/losmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2dsim/rng.hpp"
#include "d2dsim/svg.hpp"

namespace d2dsim {

LosMap build_infra_los_map(const Scene& s, double grid_res, double plane_height,
                           int n_samples, uint64_t seed) {
  if (grid_res <= 0.0) throw std::invalid_argument("grid_res must be positive");
  if (n_samples <= 0) throw std::invalid_argument("n_samples must be positive");
  LosMap m;
  m.grid_res = grid_res;
  m.plane_height = plane_height;
  m.nx = std::max(1, static_cast<int>(std::ceil(s.floor_w / grid_res - 1e-9)));
  m.ny = std::max(1, static_cast<int>(std::ceil(s.floor_d / grid_res - 1e-9)));
  m.p.assign(static_cast<size_t>(m.nx) * m.ny, 0.0);

  const double period = mobility_period(s);
  std::vector<PlacedBox> boxes;
  for (int iy = 0; iy < m.ny; ++iy) {
    for (int ix = 0; ix < m.nx; ++ix) {
      const Vec2 c = m.cell_center(ix, iy);
      const Point3 rx{c.x, c.y, plane_height};
      const size_t idx = static_cast<size_t>(iy) * m.nx + ix;
      if (period == 0.0) {
        scene_state_at(s, 0.0, boxes);
        m.p[idx] = segment_blocked(boxes, rx, s.base_station) ? 0.0 : 1.0;
        continue;
      }
      Rng rng(mix_seed(seed, idx));
      int clear = 0;
      for (int k = 0; k < n_samples; ++k) {
        scene_state_at(s, rng.uniform() * period, boxes);
        if (!segment_blocked(boxes, rx, s.base_station)) ++clear;
      }
      m.p[idx] = static_cast<double>(clear) / n_samples;
    }
  }
  return m;
}

namespace {

// A moving thing that can occlude a D2D segment: either a mobile obstacle or
// a device body.
struct MovingObject {
  const Trajectory* traj;
  double width, depth, height;
};

std::vector<MovingObject> moving_objects(const Scene& s, int exclude_a, int exclude_b) {
  std::vector<MovingObject> objs;
  for (const Obstacle& o : s.obstacles)
    if (o.trajectory)
      objs.push_back({&s.trajectory_of(*o.trajectory), o.footprint.width(),
                      o.footprint.depth(), o.height_m});
  for (const DeviceSpec& d : s.devices) {
    if (d.id == exclude_a || d.id == exclude_b) continue;
    objs.push_back({&s.trajectory_of(d.trajectory), d.blocker_width_m, d.blocker_depth_m,
                    d.blocker_height_m});
  }
  return objs;
}

PlacedBox place(const MovingObject& o, double t) {
  return {Rect::centered(pose_at(*o.traj, t), o.width, o.depth), o.height, -1};
}

}  // namespace

double los_probability_d2d(const Scene& s, const Point3& a, const Point3& b, int n_samples,
                           uint64_t seed, int exclude_a, int exclude_b) {
  if (n_samples <= 0) throw std::invalid_argument("n_samples must be positive");
  for (const Obstacle& o : s.obstacles) {
    if (o.trajectory) continue;
    if (box_blocks_segment({o.footprint, o.height_m, -1}, a, b)) return 0.0;
  }
  double prob = 1.0;
  const auto objs = moving_objects(s, exclude_a, exclude_b);
  for (size_t k = 0; k < objs.size(); ++k) {
    const double period = trajectory_period(*objs[k].traj);
    if (period <= 0.0) continue;
    Rng rng(mix_seed(seed, 0x0d2d0000ULL + k));
    int clear = 0;
    for (int i = 0; i < n_samples; ++i)
      if (!box_blocks_segment(place(objs[k], rng.uniform() * period), a, b)) ++clear;
    prob *= static_cast<double>(clear) / n_samples;
  }
  return prob;
}

int LosTrace::index_of(double t) const {
  const int count = n();
  long idx = std::lround(t / dt) % count;
  if (idx < 0) idx += count;
  return static_cast<int>(idx);
}

LosTrace build_los_trace(const Scene& s, LinkEnd a, LinkEnd b, double dt, double t_end,
                         bool marginalize, int n_draws, uint64_t seed) {
  if (dt <= 0.0 || t_end <= 0.0) throw std::invalid_argument("dt and t_end must be positive");
  const DeviceSpec* dev_a = nullptr;
  const DeviceSpec* dev_b = nullptr;
  for (const DeviceSpec& d : s.devices) {
    if (!a.base_station && d.id == a.device) dev_a = &d;
    if (!b.base_station && d.id == b.device) dev_b = &d;
  }
  if ((!a.base_station && !dev_a) || (!b.base_station && !dev_b))
    throw std::invalid_argument("trace endpoint device not in scene");

  const int exclude_a = dev_a ? dev_a->id : -1;
  const int exclude_b = dev_b ? dev_b->id : -1;
  auto endpoint = [&](const DeviceSpec* dev, double t) -> Point3 {
    return dev ? device_antenna(s, *dev, t) : s.base_station;
  };

  LosTrace trace;
  trace.dt = dt;
  const int n = std::max(1, static_cast<int>(std::llround(t_end / dt)));
  trace.p.resize(n);

  if (!marginalize) {
    std::vector<PlacedBox> boxes;
    for (int i = 0; i < n; ++i) {
      const double t = i * dt;
      scene_state_at(s, t, boxes);
      trace.p[i] = segment_blocked(boxes, endpoint(dev_a, t), endpoint(dev_b, t),
                                   exclude_a, exclude_b)
                       ? 0.0
                       : 1.0;
    }
    return trace;
  }

  // Marginalized mode: the endpoints keep their known motion; every other
  // moving object gets an unknown phase, averaged over n_draws assignments.
  if (n_draws <= 0) throw std::invalid_argument("n_draws must be positive");
  const auto objs = moving_objects(s, exclude_a, exclude_b);
  std::vector<PlacedBox> static_boxes;
  for (const Obstacle& o : s.obstacles)
    if (!o.trajectory) static_boxes.push_back({o.footprint, o.height_m, -1});

  std::vector<std::vector<double>> shifts(n_draws, std::vector<double>(objs.size(), 0.0));
  for (int d = 0; d < n_draws; ++d) {
    Rng rng(mix_seed(seed, 0x77ace000ULL + d));
    for (size_t k = 0; k < objs.size(); ++k)
      shifts[d][k] = rng.uniform() * trajectory_period(*objs[k].traj);
  }

  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    const Point3 pa = endpoint(dev_a, t);
    const Point3 pb = endpoint(dev_b, t);
    if (segment_blocked(static_boxes, pa, pb)) {
      trace.p[i] = 0.0;
      continue;
    }
    int clear = 0;
    for (int d = 0; d < n_draws; ++d) {
      bool blocked = false;
      for (size_t k = 0; k < objs.size() && !blocked; ++k)
        blocked = box_blocks_segment(place(objs[k], t + shifts[d][k]), pa, pb);
      if (!blocked) ++clear;
    }
    trace.p[i] = static_cast<double>(clear) / n_draws;
  }
  return trace;
}

LosPrediction predict_los(const LosTrace& trace, double t, double horizon_s) {
  const int n = trace.n();
  if (n == 0) throw std::invalid_argument("empty trace");
  const int i = trace.index_of(t);
  LosPrediction out;
  out.p_now = trace.p[i];

  const int m = std::max(1L, std::lround(horizon_s / trace.dt));
  double total = 0.0;
  for (double v : trace.p) total += v;
  const int wraps = m / n;
  double sum = total * wraps;
  for (int k = 0; k < m % n; ++k) sum += trace.p[(i + k) % n];
  out.p_horizon = sum / m;

  const bool now_los = out.p_now >= 0.5;
  out.residual_los_s = trace.period();
  for (int k = 1; k <= n; ++k) {
    if ((trace.p[(i + k) % n] >= 0.5) != now_los) {
      out.residual_los_s = k * trace.dt;
      break;
    }
  }
  return out;
}

void update_trace_from_observations(LosTrace& trace, const std::vector<LosObservation>& obs,
                                    double alpha) {
  for (const LosObservation& o : obs) {
    double& p = trace.p[trace.index_of(o.t)];
    p = (1.0 - alpha) * p + alpha * (o.los ? 1.0 : 0.0);
  }
}

std::string losmap_to_csv(const LosMap& m) {
  std::string out = "x_m,y_m,p\n";
  for (int iy = 0; iy < m.ny; ++iy) {
    for (int ix = 0; ix < m.nx; ++ix) {
      const Vec2 c = m.cell_center(ix, iy);
      out += fmt_g(c.x) + "," + fmt_g(c.y) + "," + fmt_g(m.at(ix, iy)) + "\n";
    }
  }
  return out;
}

std::string losmap_to_svg(const LosMap& m) {
  const double scale = 40.0;
  const double w = m.nx * m.grid_res * scale;
  const double h = m.ny * m.grid_res * scale;
  const double legend = 46.0;
  Svg svg(w + legend + 10, h + 30);
  for (int iy = 0; iy < m.ny; ++iy) {
    for (int ix = 0; ix < m.nx; ++ix) {
      const double p = m.at(ix, iy);
      // blue (p=0) to yellow (p=1)
      const int r = static_cast<int>(std::lround(250 * p + 20 * (1 - p)));
      const int g = static_cast<int>(std::lround(210 * p + 60 * (1 - p)));
      const int b = static_cast<int>(std::lround(60 * p + 160 * (1 - p)));
      char fill[16];
      snprintf(fill, sizeof fill, "#%02x%02x%02x", r, g, b);
      // y axis points up in floor coordinates
      svg.rect(ix * m.grid_res * scale, h - (iy + 1) * m.grid_res * scale,
               m.grid_res * scale + 0.5, m.grid_res * scale + 0.5, fill);
    }
  }
  for (int i = 0; i <= 10; ++i) {
    const double p = 1.0 - i / 10.0;
    const int r = static_cast<int>(std::lround(250 * p + 20 * (1 - p)));
    const int g = static_cast<int>(std::lround(210 * p + 60 * (1 - p)));
    const int b = static_cast<int>(std::lround(60 * p + 160 * (1 - p)));
    char fill[16];
    snprintf(fill, sizeof fill, "#%02x%02x%02x", r, g, b);
    svg.rect(w + 10, i * h / 11.0, 16, h / 11.0 + 0.5, fill);
  }
  svg.text(w + 30, 12, "1");
  svg.text(w + 30, h, "0");
  svg.text(2, h + 18, "LoS probability to base station, cell size " + fmt_g(m.grid_res) + " m");
  return svg.finish();
}

std::string trace_to_csv(const LosTrace& t) {
  std::string out = "t_s,p\n";
  for (int i = 0; i < t.n(); ++i) out += fmt_g(i * t.dt) + "," + fmt_g(t.p[i]) + "\n";
  return out;
}

std::string traces_to_svg(const std::vector<std::pair<std::string, LosTrace>>& traces) {
  const double w = 900, h = 60;
  const double label = 70;
  const int rows = static_cast<int>(traces.size());
  Svg svg(w + label + 20, rows * (h + 14) + 30);
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  for (int r = 0; r < rows; ++r) {
    const LosTrace& tr = traces[r].second;
    const double y0 = 10 + r * (h + 14);
    svg.text(4, y0 + h / 2 + 4, traces[r].first, 11);
    svg.line(label, y0 + h, label + w, y0 + h, "#cccccc");
    svg.polyline_begin(colors[r % 8], 1.0);
    for (int i = 0; i < tr.n(); ++i)
      svg.polyline_point(label + w * i / std::max(1, tr.n() - 1), y0 + h * (1.0 - tr.p[i]));
    svg.polyline_end();
  }
  svg.text(label, rows * (h + 14) + 24, "LoS probability over one period, 1 = clear", 11);
  return svg.finish();
}

}  // namespace d2dsim
