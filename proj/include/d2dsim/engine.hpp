#pragma once

#include <cstdint>
#include <vector>

#include "d2dsim/dissemination.hpp"
#include "d2dsim/rng.hpp"

namespace d2dsim {

// Constant-bit-rate chunking: every interarrival one content of
// bitrate * interarrival bits falls due, per origin.
struct TrafficParams {
  double interarrival_s = 0.010;
  double bitrate_bps = 300e6;
  double deadline_s = 1.5;

  double size_bits() const { return bitrate_bps * interarrival_s; }
};

struct SimConfig {
  Scene scene;
  RadioParams infra;
  RadioParams d2d;
  PolicyParams policy;
  TrafficParams traffic;
  Strategy strategy = Strategy::Predictive;
  double duration_s = 60.0;
  double tick_s = 1e-3;
  uint64_t seed = 1;
  // Per-run variability: each device's trajectory phase is re-drawn uniformly
  // over its own period. Off keeps the scene exactly as configured.
  bool randomize_device_phases = true;
};

// Each origin draws one phase in [0, interarrival) and then emits strictly
// periodically until duration. Returned sorted by (created_at, origin) with
// sequential ids from zero.
std::vector<Content> generate_traffic(const std::vector<int>& origins, const TrafficParams& t,
                                      double duration_s, Rng& rng);

// The cell uplink is processor-shared: every in-progress upload with a
// positive raw rate gets raw/k, where k counts those uploads. Zero stays zero.
std::vector<double> share_uplink(const std::vector<double>& raw_rates);

// O(1) lookups into an exact 0/1 trace. p_horizon reproduces predict_los
// sample-for-sample: integer-valued sums keep the arithmetic exact in either
// evaluation order.
class TracePredictor {
 public:
  TracePredictor() = default;
  explicit TracePredictor(LosTrace trace);

  bool los_at(double t) const { return trace_.p[trace_.index_of(t)] >= 0.5; }
  double p_now(double t) const { return trace_.p[trace_.index_of(t)]; }
  double p_horizon(double t, double horizon_s) const;
  const LosTrace& trace() const { return trace_; }

 private:
  LosTrace trace_;
  std::vector<double> prefix_;  // prefix_[j] = sum of the first j samples
};

struct RunMetrics {
  int64_t generated = 0;
  int64_t delivered = 0;
  int64_t dropped_blockage = 0;
  int64_t dropped_insufficient = 0;
  int64_t censored = 0;  // still in flight when the run ends
  int64_t stored = 0;    // contents that waited in a cache at least once
  int64_t forwarded = 0; // completed handoffs
  int64_t handoff_aborts = 0;
  double mean_delay_s = 0.0;
  double max_delay_s = 0.0;

  int64_t dropped() const { return dropped_blockage + dropped_insufficient; }
  int64_t decided() const { return delivered + dropped(); }
  double drop_fraction() const;
  double blockage_drop_fraction() const;  // blockage drops over decided traffic
  double rate_drop_fraction() const;
};

RunMetrics run_simulation(const SimConfig& cfg);

struct Stat {
  double mean = 0.0;
  double sd = 0.0;
  double ci95 = 0.0;  // normal approximation, zero for a single sample
};

Stat aggregate(const std::vector<double>& xs);

}  // namespace d2dsim
