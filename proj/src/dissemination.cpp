#include "d2dsim/dissemination.hpp"

#include <algorithm>

namespace d2dsim {

bool cache_insert(CacheState& cache, int64_t content_id, double size_bits) {
  if (std::find(cache.entries.begin(), cache.entries.end(), content_id) != cache.entries.end())
    return false;
  if (size_bits > cache.headroom_bits()) return false;
  cache.entries.push_back(content_id);
  cache.used_bits += size_bits;
  return true;
}

bool cache_erase(CacheState& cache, int64_t content_id, double size_bits) {
  auto it = std::find(cache.entries.begin(), cache.entries.end(), content_id);
  if (it == cache.entries.end()) return false;
  cache.entries.erase(it);
  cache.used_bits = std::max(0.0, cache.used_bits - size_bits);
  return true;
}

double helper_score(const HelperInfo& h) {
  return h.d2d.usable ? h.infra_pred.p_horizon : 0.0;
}

const HelperInfo* select_helper(const std::vector<HelperInfo>& helpers) {
  const HelperInfo* best = nullptr;
  double best_score = 0.0;
  for (const HelperInfo& h : helpers) {
    const double score = helper_score(h);
    if (score <= 0.0) continue;
    if (!best || score > best_score ||
        (score == best_score && (h.d2d.distance_m < best->d2d.distance_m ||
                                 (h.d2d.distance_m == best->d2d.distance_m && h.id < best->id)))) {
      best = &h;
      best_score = score;
    }
  }
  return best;
}

ModeDecision select_mode(Strategy strategy, const ModeContext& ctx, double decided_at,
                         const PolicyParams& policy) {
  ModeDecision d;
  d.decided_at = decided_at;
  d.own_score = ctx.own_pred.p_horizon;

  if (strategy == Strategy::Direct) {
    d.mode = Mode::DirectPush;
    return d;
  }

  const bool push_now = ctx.infra.usable && ctx.own_pred.p_horizon >= policy.theta_push;
  if (push_now) {
    d.mode = Mode::DirectPush;
    return d;
  }

  if (strategy == Strategy::Predictive) {
    const HelperInfo* best = select_helper(ctx.helpers);
    if (best) {
      d.best_helper_score = helper_score(*best);
      if (d.best_helper_score - d.own_score >= policy.delta && best->d2d.usable &&
          best->headroom_bits >= ctx.size_bits) {
        d.mode = Mode::ForwardAndPush;
        d.helper_id = best->id;
        return d;
      }
    }
  }

  d.mode = Mode::StoreAndPush;
  return d;
}

void advance_content(Content& c, double interval_start, double elapsed_s, double rate_bps) {
  if (rate_bps <= 0.0 || elapsed_s <= 0.0) return;
  const double can_send = rate_bps * elapsed_s;
  if (can_send >= c.remaining_bits) {
    c.delivered_at = interval_start + c.remaining_bits / rate_bps;
    c.remaining_bits = 0.0;
    c.state = Content::State::Delivered;
    return;
  }
  c.remaining_bits -= can_send;
}

DropCause classify_drop(double outage_fraction, double theta_block) {
  return outage_fraction > theta_block ? DropCause::Blockage : DropCause::InsufficientRate;
}

}  // namespace d2dsim
