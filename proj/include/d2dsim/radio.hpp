#pragma once

#include <optional>
#include <vector>

#include "d2dsim/scene.hpp"

namespace d2dsim {

enum class NlosMode {
  Soft,  // blocked links fall back to the NLoS pathloss formula
  Hard   // blocked links carry no rate at all
};

struct RadioParams {
  double carrier_ghz = 28.0;
  double bandwidth_hz = 800e6;
  double tx_power_dbm = 23.0;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  double noise_figure_db = 7.0;
  std::optional<double> rate_cap_bps;
  std::optional<double> max_range_m;
  double setup_time_s = 0.0;  // paid once per D2D handoff
  NlosMode nlos_mode = NlosMode::Soft;
};

// Indoor-factory pathloss. Distances below 1 m clamp to 1 m. The NLoS value
// is never below the LoS value at the same distance.
double pathloss_db(double distance_m, bool los, double carrier_ghz);

// Link budget against thermal noise: tx power + antenna gains - pathloss
// - (-174 dBm/Hz + 10*log10(bandwidth) + noise figure).
double snr_db(const RadioParams& p, double pathloss);

// Shannon rate, clamped to the configured cap; 0 below -10 dB SNR.
double achievable_rate_bps(const RadioParams& p, double snr);

struct LinkState {
  bool los = false;
  double distance_m = 0.0;
  double pathloss_db = 0.0;
  double snr_db = 0.0;
  double rate_bps = 0.0;
  bool usable = false;
};

// Link budget from a known LoS condition and distance: pathloss, SNR, rate
// (hard NLoS zeroes it), and range gating.
LinkState link_state(bool los, double distance_m, const RadioParams& p);

// Same evaluation with LoS derived from the scene geometry.
LinkState link_state(const std::vector<PlacedBox>& boxes, const Point3& tx, const Point3& rx,
                     const RadioParams& p, int exclude_tx = -1, int exclude_rx = -1);

}  // namespace d2dsim
