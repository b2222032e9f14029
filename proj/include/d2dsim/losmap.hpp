#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "d2dsim/scene.hpp"

namespace d2dsim {

// Probability of line-of-sight to the base station, sampled on a floor grid
// at a fixed receiver plane height.
struct LosMap {
  double grid_res = 0.25;
  double plane_height = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> p;  // row-major, index iy * nx + ix

  double at(int ix, int iy) const { return p[static_cast<size_t>(iy) * nx + ix]; }
  Vec2 cell_center(int ix, int iy) const {
    return {(ix + 0.5) * grid_res, (iy + 0.5) * grid_res};
  }
};

// Monte Carlo over blocker configurations: each cell draws its own sample
// times uniformly over one mobility period (derived per-cell seed, so cells
// are independent and the build can be cut along cells). An all-static scene
// collapses to a single exact evaluation per cell.
LosMap build_infra_los_map(const Scene& s, double grid_res, double plane_height,
                           int n_samples, uint64_t seed);

// Two-stage D2D estimate: product of per-object marginal non-blocking
// probabilities (each object's phase sampled independently over its own
// period) times the 0/1 indicator of the static geometry. Device bodies given
// in exclude_a/exclude_b (the endpoints themselves) do not count as blockers.
double los_probability_d2d(const Scene& s, const Point3& a, const Point3& b, int n_samples,
                           uint64_t seed, int exclude_a = -1, int exclude_b = -1);

struct LinkEnd {
  bool base_station = false;
  int device = -1;

  static LinkEnd bs() { return {true, -1}; }
  static LinkEnd dev(int id) { return {false, id}; }
};

// Sampled LoS probability over time, periodically extended beyond its domain.
struct LosTrace {
  double dt = 1e-3;
  std::vector<double> p;

  int n() const { return static_cast<int>(p.size()); }
  double period() const { return dt * static_cast<double>(p.size()); }
  int index_of(double t) const;  // nearest sample, wrapped into the domain
};

// Exact mode (marginalize=false) evaluates the deterministic 0/1 LoS of the
// link at each sample time. Marginalized mode averages over n_draws random
// phase assignments for every moving object that is not a link endpoint.
LosTrace build_los_trace(const Scene& s, LinkEnd a, LinkEnd b, double dt, double t_end,
                         bool marginalize, int n_draws, uint64_t seed);

struct LosPrediction {
  double p_now = 0.0;
  double p_horizon = 0.0;     // mean over [t, t+H)
  double residual_los_s = 0.0;  // time to the first 0.5-crossing, capped at the period
};

LosPrediction predict_los(const LosTrace& trace, double t, double horizon_s);

struct LosObservation {
  double t = 0.0;
  bool los = false;
};

// Exponential moving average toward observed 0/1 outcomes at the nearest
// trace sample (wrapped by the trace period).
void update_trace_from_observations(LosTrace& trace, const std::vector<LosObservation>& obs,
                                    double alpha = 0.2);

std::string losmap_to_csv(const LosMap& m);
std::string losmap_to_svg(const LosMap& m);
std::string trace_to_csv(const LosTrace& t);
std::string traces_to_svg(const std::vector<std::pair<std::string, LosTrace>>& traces);

}  // namespace d2dsim
