#include "d2dsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace d2dsim {

std::vector<Content> generate_traffic(const std::vector<int>& origins, const TrafficParams& t,
                                      double duration_s, Rng& rng) {
  if (t.interarrival_s <= 0.0 || t.bitrate_bps <= 0.0 || t.deadline_s <= 0.0 || duration_s <= 0.0)
    throw std::invalid_argument("traffic parameters must be positive");
  const double size = t.size_bits();
  std::vector<Content> out;
  for (int origin : origins) {
    const double phase = rng.uniform() * t.interarrival_s;
    for (int64_t j = 0;; ++j) {
      const double at = phase + static_cast<double>(j) * t.interarrival_s;
      if (at >= duration_s) break;
      Content c;
      c.origin = origin;
      c.holder = origin;
      c.created_at = at;
      c.deadline_at = at + t.deadline_s;
      c.size_bits = size;
      c.remaining_bits = size;
      out.push_back(c);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Content& a, const Content& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.origin < b.origin;
  });
  for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int64_t>(i);
  return out;
}

std::vector<double> share_uplink(const std::vector<double>& raw_rates) {
  int k = 0;
  for (double r : raw_rates)
    if (r > 0.0) ++k;
  std::vector<double> shared = raw_rates;
  if (k > 0)
    for (double& r : shared)
      if (r > 0.0) r /= k;
  return shared;
}

TracePredictor::TracePredictor(LosTrace trace) : trace_(std::move(trace)) {
  prefix_.resize(trace_.p.size() + 1, 0.0);
  for (size_t j = 0; j < trace_.p.size(); ++j) prefix_[j + 1] = prefix_[j] + trace_.p[j];
}

double TracePredictor::p_horizon(double t, double horizon_s) const {
  const int n = trace_.n();
  const int i = trace_.index_of(t);
  const long m = std::max(1L, std::lround(horizon_s / trace_.dt));
  const double total = prefix_[n];
  double sum = total * static_cast<double>(m / n);
  const int r = static_cast<int>(m % n);
  if (i + r <= n)
    sum += prefix_[i + r] - prefix_[i];
  else
    sum += (total - prefix_[i]) + prefix_[i + r - n];
  return sum / static_cast<double>(m);
}

double RunMetrics::drop_fraction() const {
  const int64_t d = decided();
  return d > 0 ? static_cast<double>(dropped()) / static_cast<double>(d) : 0.0;
}

double RunMetrics::blockage_drop_fraction() const {
  const int64_t d = decided();
  return d > 0 ? static_cast<double>(dropped_blockage) / static_cast<double>(d) : 0.0;
}

double RunMetrics::rate_drop_fraction() const {
  const int64_t d = decided();
  return d > 0 ? static_cast<double>(dropped_insufficient) / static_cast<double>(d) : 0.0;
}

Stat aggregate(const std::vector<double>& xs) {
  Stat s;
  const size_t n = xs.size();
  if (n == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(n);
  if (n == 1) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  s.ci95 = 1.96 * s.sd / std::sqrt(static_cast<double>(n));
  return s;
}

namespace {

// Per-device uplink states evaluated lazily at one tick boundary.
struct UplinkMemo {
  std::vector<char> known;
  std::vector<LinkState> ls;

  void reset(size_t n) {
    known.assign(n, 0);
    ls.resize(n);
  }
};

}  // namespace

RunMetrics run_simulation(const SimConfig& cfg) {
  if (cfg.tick_s <= 0.0 || cfg.duration_s <= 0.0)
    throw std::invalid_argument("tick and duration must be positive");
  if (cfg.traffic.interarrival_s < cfg.tick_s)
    throw std::invalid_argument("interarrival must be at least one tick");
  if (cfg.scene.devices.empty()) throw std::invalid_argument("scene has no devices");

  Scene scene = cfg.scene;
  if (cfg.randomize_device_phases) {
    Rng rng(mix_seed(cfg.seed, 0x70686173ULL));
    for (DeviceSpec& d : scene.devices) {
      const Trajectory& base = scene.trajectory_of(d.trajectory);
      Trajectory own = base;
      own.phase_offset_s = base.phase_offset_s + rng.uniform() * trajectory_period(base);
      const std::string key = d.trajectory + "#" + std::to_string(d.id);
      scene.trajectories[key] = own;
      d.trajectory = key;
    }
  }

  const int nd = static_cast<int>(scene.devices.size());
  std::map<int, int> dev_index;
  for (int i = 0; i < nd; ++i) dev_index[scene.devices[i].id] = i;
  if (static_cast<int>(dev_index.size()) != nd)
    throw std::invalid_argument("duplicate device ids");

  std::vector<int> origins;
  for (const DeviceSpec& d : scene.devices) origins.push_back(d.id);
  Rng traffic_rng(mix_seed(cfg.seed, 0x74726166ULL));
  std::vector<Content> contents =
      generate_traffic(origins, cfg.traffic, cfg.duration_s, traffic_rng);

  // Exact uplink LoS traces over one mobility period, all devices in a single
  // sweep so the scene is placed once per sample time.
  const double dt = cfg.tick_s;
  const double period = mobility_period(scene);
  const int trace_n =
      period > 0.0 ? std::max(1, static_cast<int>(std::llround(period / dt))) : 1;
  std::vector<LosTrace> traces(nd);
  for (int d = 0; d < nd; ++d) {
    traces[d].dt = dt;
    traces[d].p.resize(trace_n);
  }
  {
    std::vector<PlacedBox> sweep_boxes;
    for (int i = 0; i < trace_n; ++i) {
      const double t = i * dt;
      scene_state_at(scene, t, sweep_boxes);
      for (int d = 0; d < nd; ++d) {
        const Point3 ant = device_antenna(scene, scene.devices[d], t);
        traces[d].p[i] = segment_blocked(sweep_boxes, scene.base_station, ant, -1,
                                         scene.devices[d].id)
                             ? 0.0
                             : 1.0;
      }
    }
  }
  std::vector<TracePredictor> pred;
  pred.reserve(nd);
  for (int d = 0; d < nd; ++d) pred.emplace_back(std::move(traces[d]));

  std::vector<CacheState> caches(nd);
  for (int d = 0; d < nd; ++d) {
    caches[d].device_id = scene.devices[d].id;
    caches[d].capacity_bits = cfg.policy.cache_capacity_bits;
  }

  const size_t nc = contents.size();
  std::vector<double> handoff_started(nc, -1.0);
  std::vector<double> handoff_done(nc, -1.0);
  std::vector<char> origin_cached(nc, 0);  // origin copy kept during a handoff
  std::vector<char> ever_stored(nc, 0);

  RunMetrics m;
  m.generated = static_cast<int64_t>(nc);

  auto antenna_at = [&](int idx, double t) {
    return device_antenna(scene, scene.devices[idx], t);
  };
  auto uplink_at = [&](int idx, double t) {
    const Point3 ant = antenna_at(idx, t);
    return link_state(pred[idx].los_at(t), distance(ant, scene.base_station), cfg.infra);
  };

  auto drop_now = [&](Content& c) {
    const double span = c.deadline_at - c.created_at;
    c.drop_cause =
        classify_drop(span > 0.0 ? c.outage_s / span : 0.0, cfg.policy.theta_block);
    c.state = Content::State::Dropped;
  };

  auto release_cache_of = [&](Content& c) {
    if (c.state == Content::State::StoredLocal) {
      cache_erase(caches[dev_index[c.holder]], c.id, c.size_bits);
    } else if (c.state == Content::State::ForwardedTo) {
      cache_erase(caches[dev_index[c.forward_target]], c.id, c.size_bits);
      if (origin_cached[c.id]) {
        cache_erase(caches[dev_index[c.origin]], c.id, c.size_bits);
        origin_cached[c.id] = 0;
      }
    }
  };

  std::vector<PlacedBox> decide_boxes;

  // Geometry and predictions of every potential helper of device oi at one
  // instant. Headroom is filled here too but gets refreshed per decision,
  // since forwards reserve cache space as they are made.
  auto build_helper_table = [&](int oi, double when) {
    std::vector<HelperInfo> table;
    const Point3 ant = antenna_at(oi, when);
    scene_state_at(scene, when, decide_boxes);
    for (int h = 0; h < nd; ++h) {
      if (h == oi) continue;
      HelperInfo info;
      info.id = scene.devices[h].id;
      info.d2d = link_state(decide_boxes, ant, antenna_at(h, when), cfg.d2d,
                            scene.devices[oi].id, info.id);
      info.infra_pred = {pred[h].p_now(when), pred[h].p_horizon(when, cfg.policy.horizon_s),
                         0.0};
      info.headroom_bits = caches[h].headroom_bits();
      table.push_back(info);
    }
    return table;
  };

  // Shared by fresh arrivals and stored-content re-decisions. The helper table
  // is only materialized when the immediate-push shortcut cannot fire, which
  // mirrors the order select_mode checks its inputs in. Epoch decisions pass a
  // cached table so one device's backlog costs one geometry pass.
  auto decide = [&](const Content& c, double when, double* d2d_rate_out,
                    const std::vector<HelperInfo>* cached = nullptr) {
    const int oi = dev_index.at(c.origin);
    ModeContext ctx;
    const Point3 ant = antenna_at(oi, when);
    ctx.infra =
        link_state(pred[oi].los_at(when), distance(ant, scene.base_station), cfg.infra);
    ctx.own_pred = {pred[oi].p_now(when), pred[oi].p_horizon(when, cfg.policy.horizon_s),
                    0.0};
    ctx.size_bits = c.size_bits;
    const bool push_now =
        ctx.infra.usable && ctx.own_pred.p_horizon >= cfg.policy.theta_push;
    if (cfg.strategy == Strategy::Predictive && !push_now) {
      ctx.helpers = cached ? *cached : build_helper_table(oi, when);
      for (HelperInfo& h : ctx.helpers)
        h.headroom_bits = caches[dev_index.at(h.id)].headroom_bits();
    }
    const ModeDecision d = select_mode(cfg.strategy, ctx, when, cfg.policy);
    if (d.mode == Mode::ForwardAndPush && d2d_rate_out) {
      for (const HelperInfo& h : ctx.helpers)
        if (h.id == d.helper_id) {
          *d2d_rate_out = h.d2d.rate_bps;
          break;
        }
    }
    return d;
  };

  std::vector<int64_t> active;
  size_t next_arrival = 0;

  auto handle_arrival = [&](Content& c) {
    const double a = c.created_at;
    double d2d_rate = 0.0;
    const ModeDecision d = decide(c, a, &d2d_rate);
    if (d.mode == Mode::DirectPush) {
      c.state = Content::State::Uploading;
      c.uploading_since = a;
    } else if (d.mode == Mode::StoreAndPush) {
      if (cache_insert(caches[dev_index[c.origin]], c.id, c.size_bits)) {
        c.state = Content::State::StoredLocal;
        ever_stored[c.id] = 1;
      } else {
        drop_now(c);
      }
    } else {
      const bool ok = cache_insert(caches[dev_index[d.helper_id]], c.id, c.size_bits);
      assert(ok);
      (void)ok;
      c.state = Content::State::ForwardedTo;
      c.forward_target = d.helper_id;
      handoff_started[c.id] = a;
      handoff_done[c.id] = a + cfg.d2d.setup_time_s + c.size_bits / d2d_rate;
    }
    if (!c.terminal()) active.push_back(c.id);
  };

  const int64_t n_ticks = static_cast<int64_t>(std::ceil(cfg.duration_s / dt - 1e-9));
  const int64_t redecide =
      std::max<int64_t>(1, std::llround(cfg.policy.redecision_s / dt));

  UplinkMemo prev_memo;
  UplinkMemo cur_memo;
  prev_memo.reset(nd);
  cur_memo.reset(nd);

  std::vector<int64_t> upload_ids;
  std::vector<double> raw_rates;
  std::vector<PlacedBox> boxes_prev;
  std::vector<int8_t> epoch_table_known;
  std::vector<std::vector<HelperInfo>> epoch_tables(static_cast<size_t>(nd));

  for (int64_t k = 1; k <= n_ticks; ++k) {
    const double t_prev = static_cast<double>(k - 1) * dt;
    const double t = static_cast<double>(k) * dt;

    // last tick's boundary states become this interval's starting states
    std::swap(prev_memo, cur_memo);
    cur_memo.reset(nd);
    if (k == 1) prev_memo.reset(nd);

    auto prev_uplink = [&](int idx) -> const LinkState& {
      if (!prev_memo.known[idx]) {
        prev_memo.ls[idx] = uplink_at(idx, t_prev);
        prev_memo.known[idx] = 1;
      }
      return prev_memo.ls[idx];
    };
    auto cur_uplink = [&](int idx) -> const LinkState& {
      if (!cur_memo.known[idx]) {
        cur_memo.ls[idx] = uplink_at(idx, t);
        cur_memo.known[idx] = 1;
      }
      return cur_memo.ls[idx];
    };

    bool have_boxes_prev = false;
    auto boxes_at_prev = [&]() -> const std::vector<PlacedBox>& {
      if (!have_boxes_prev) {
        scene_state_at(scene, t_prev, boxes_prev);
        have_boxes_prev = true;
      }
      return boxes_prev;
    };

    // arrivals up to and including this boundary, decided at their own instant
    while (next_arrival < nc && contents[next_arrival].created_at <= t)
      handle_arrival(contents[next_arrival++]);

    // uploads progress over (t_prev, t] with rates frozen at the interval
    // start; only uploads already in progress at the start take part
    upload_ids.clear();
    raw_rates.clear();
    for (int64_t id : active) {
      Content& c = contents[id];
      if (c.state != Content::State::Uploading || c.uploading_since > t_prev) continue;
      const LinkState& up = prev_uplink(dev_index[c.holder]);
      upload_ids.push_back(id);
      raw_rates.push_back(up.usable ? up.rate_bps : 0.0);
    }
    const std::vector<double> shared = share_uplink(raw_rates);
    for (size_t i = 0; i < upload_ids.size(); ++i) {
      if (shared[i] <= 0.0) continue;
      Content& c = contents[upload_ids[i]];
      const double elapsed = std::min(dt, c.deadline_at - t_prev);
      if (elapsed <= 0.0) continue;
      advance_content(c, t_prev, elapsed, shared[i]);
    }

    // outage accrues in whole ticks against the current holder's uplink
    for (int64_t id : active) {
      Content& c = contents[id];
      if (c.terminal() || c.created_at > t_prev) continue;
      if (!prev_uplink(dev_index[c.holder]).usable) c.outage_s += dt;
    }

    // handoffs in flight: abort when the D2D link degrades, land when done
    for (int64_t id : active) {
      Content& c = contents[id];
      if (c.state != Content::State::ForwardedTo || handoff_started[id] > t_prev) continue;
      const int oi = dev_index[c.holder];
      const int ti = dev_index[c.forward_target];
      const LinkState d2d = link_state(boxes_at_prev(), antenna_at(oi, t_prev),
                                       antenna_at(ti, t_prev), cfg.d2d, c.holder,
                                       c.forward_target);
      if (!d2d.usable) {
        ++m.handoff_aborts;
        cache_erase(caches[ti], c.id, c.size_bits);
        c.forward_target = -1;
        if (origin_cached[id]) {
          origin_cached[id] = 0;  // the stored copy never left the origin
          c.state = Content::State::StoredLocal;
        } else if (cache_insert(caches[oi], c.id, c.size_bits)) {
          c.state = Content::State::StoredLocal;
          ever_stored[id] = 1;
        } else {
          drop_now(c);
        }
      } else if (handoff_done[id] <= t) {
        ++m.forwarded;
        if (origin_cached[id]) {
          cache_erase(caches[oi], c.id, c.size_bits);
          origin_cached[id] = 0;
        }
        c.holder = c.forward_target;
        c.forward_target = -1;
        c.state = Content::State::StoredLocal;
        ever_stored[id] = 1;
      }
    }

    // expiry sweep; a delivery inside this tick beat its deadline by
    // construction (progress is clamped at the deadline instant)
    for (int64_t id : active) {
      Content& c = contents[id];
      if (c.terminal() || c.deadline_at > t) continue;
      release_cache_of(c);
      drop_now(c);
    }

    // stored copies push as soon as the uplink returns; interrupted uploads
    // fall back into storage when the strategy has any
    for (int64_t id : active) {
      Content& c = contents[id];
      if (c.terminal()) continue;
      const int hi = dev_index[c.holder];
      if (c.state == Content::State::StoredLocal) {
        if (cur_uplink(hi).usable) {
          cache_erase(caches[hi], c.id, c.size_bits);
          c.state = Content::State::Uploading;
          c.uploading_since = t;
        }
      } else if (c.state == Content::State::Uploading &&
                 cfg.strategy != Strategy::Direct) {
        if (!cur_uplink(hi).usable) {
          if (cache_insert(caches[hi], c.id, c.size_bits)) {
            c.state = Content::State::StoredLocal;
            ever_stored[id] = 1;
          } else {
            drop_now(c);
          }
        }
      }
    }

    // stored contents still at their origin reconsider the mode periodically
    if (cfg.strategy == Strategy::Predictive && k % redecide == 0) {
      epoch_table_known.assign(static_cast<size_t>(nd), 0);
      for (int64_t id : active) {
        Content& c = contents[id];
        if (c.state != Content::State::StoredLocal || c.holder != c.origin) continue;
        const int oi = dev_index[c.origin];
        if (!epoch_table_known[oi]) {
          epoch_tables[oi] = build_helper_table(oi, t);
          epoch_table_known[oi] = 1;
        }
        double d2d_rate = 0.0;
        const ModeDecision d = decide(c, t, &d2d_rate, &epoch_tables[oi]);
        if (d.mode != Mode::ForwardAndPush) continue;
        const bool ok = cache_insert(caches[dev_index[d.helper_id]], c.id, c.size_bits);
        assert(ok);
        (void)ok;
        c.state = Content::State::ForwardedTo;
        c.forward_target = d.helper_id;
        origin_cached[id] = 1;
        handoff_started[id] = t;
        handoff_done[id] = t + cfg.d2d.setup_time_s + c.size_bits / d2d_rate;
      }
    }

    active.erase(std::remove_if(active.begin(), active.end(),
                                [&](int64_t id) { return contents[id].terminal(); }),
                 active.end());
  }

  double delay_sum = 0.0;
  for (const Content& c : contents) {
    switch (c.state) {
      case Content::State::Delivered: {
        ++m.delivered;
        const double delay = c.delivered_at - c.created_at;
        delay_sum += delay;
        m.max_delay_s = std::max(m.max_delay_s, delay);
        break;
      }
      case Content::State::Dropped:
        if (c.drop_cause == DropCause::Blockage)
          ++m.dropped_blockage;
        else
          ++m.dropped_insufficient;
        break;
      default:
        ++m.censored;
        break;
    }
    if (ever_stored[c.id]) ++m.stored;
  }
  if (m.delivered > 0) m.mean_delay_s = delay_sum / static_cast<double>(m.delivered);
  assert(m.generated == m.delivered + m.dropped() + m.censored);
  return m;
}

}  // namespace d2dsim
