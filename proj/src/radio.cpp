#include "d2dsim/radio.hpp"

#include <algorithm>
#include <cmath>

namespace d2dsim {

double pathloss_db(double distance_m, bool los, double carrier_ghz) {
  const double d = std::max(distance_m, 1.0);
  const double lf = std::log10(carrier_ghz);
  const double pl_los = 31.84 + 21.5 * std::log10(d) + 19.0 * lf;
  if (los) return pl_los;
  const double pl_nlos = 33.0 + 25.5 * std::log10(d) + 20.0 * lf;
  return std::max(pl_los, pl_nlos);
}

double snr_db(const RadioParams& p, double pathloss) {
  const double noise_dbm = -174.0 + 10.0 * std::log10(p.bandwidth_hz) + p.noise_figure_db;
  return p.tx_power_dbm + p.tx_gain_dbi + p.rx_gain_dbi - pathloss - noise_dbm;
}

double achievable_rate_bps(const RadioParams& p, double snr) {
  if (snr < -10.0) return 0.0;
  double rate = p.bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr / 10.0));
  if (p.rate_cap_bps) rate = std::min(rate, *p.rate_cap_bps);
  return rate;
}

LinkState link_state(bool los, double distance_m, const RadioParams& p) {
  LinkState s;
  s.distance_m = distance_m;
  s.los = los;
  s.pathloss_db = pathloss_db(s.distance_m, s.los, p.carrier_ghz);
  s.snr_db = snr_db(p, s.pathloss_db);
  s.rate_bps = achievable_rate_bps(p, s.snr_db);
  if (!s.los && p.nlos_mode == NlosMode::Hard) s.rate_bps = 0.0;
  const bool in_range = !p.max_range_m || s.distance_m <= *p.max_range_m;
  s.usable = in_range && s.rate_bps > 0.0;
  return s;
}

LinkState link_state(const std::vector<PlacedBox>& boxes, const Point3& tx, const Point3& rx,
                     const RadioParams& p, int exclude_tx, int exclude_rx) {
  return link_state(!segment_blocked(boxes, tx, rx, exclude_tx, exclude_rx), distance(tx, rx),
                    p);
}

}  // namespace d2dsim
