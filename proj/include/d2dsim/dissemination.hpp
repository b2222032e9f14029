#pragma once

#include <cstdint>
#include <vector>

#include "d2dsim/losmap.hpp"
#include "d2dsim/radio.hpp"

namespace d2dsim {

enum class Strategy { Direct, DirectWithStorage, Predictive };

enum class Mode { DirectPush, StoreAndPush, ForwardAndPush };

enum class DropCause { Blockage, InsufficientRate };

// Thresholds shared by mode selection and the run loop.
struct PolicyParams {
  double theta_push = 0.9;     // predicted-LoS gate for pushing immediately
  double delta = 0.2;          // helper advantage required to forward
  double horizon_s = 0.05;     // prediction window
  double theta_block = 0.5;    // outage fraction separating the two drop causes
  double redecision_s = 0.005; // how often stored contents reconsider their mode
  double cache_capacity_bits = 256e6 * 8.0;
};

struct Content {
  enum class State { Queued, Uploading, ForwardedTo, StoredLocal, Delivered, Dropped };

  int64_t id = 0;
  int origin = 0;
  double created_at = 0.0;
  double deadline_at = 0.0;
  double size_bits = 0.0;

  State state = State::Queued;
  int holder = 0;            // origin, or the helper once a handoff completes
  int forward_target = -1;   // valid while state == ForwardedTo
  double remaining_bits = 0.0;
  double uploading_since = -1.0;
  double outage_s = 0.0;     // accumulated time with an unusable uplink
  double delivered_at = -1.0;
  DropCause drop_cause = DropCause::Blockage;

  bool terminal() const { return state == State::Delivered || state == State::Dropped; }
};

struct CacheState {
  int device_id = 0;
  double capacity_bits = 0.0;
  double used_bits = 0.0;
  std::vector<int64_t> entries;

  double headroom_bits() const { return capacity_bits - used_bits; }
};

// False when the content does not fit or the id is already cached.
bool cache_insert(CacheState& cache, int64_t content_id, double size_bits);
bool cache_erase(CacheState& cache, int64_t content_id, double size_bits);

struct HelperInfo {
  int id = -1;
  LinkState d2d;             // origin -> helper link right now
  LosPrediction infra_pred;  // helper's own uplink forecast
  double headroom_bits = 0.0;
};

// helper p_horizon gated by D2D usability.
double helper_score(const HelperInfo& h);

// Highest score wins; ties prefer the shorter D2D hop, then the smaller id.
// Null when the table is empty or no helper scores above zero.
const HelperInfo* select_helper(const std::vector<HelperInfo>& helpers);

struct ModeContext {
  LinkState infra;           // origin uplink right now
  LosPrediction own_pred;
  double size_bits = 0.0;
  std::vector<HelperInfo> helpers;
};

struct ModeDecision {
  Mode mode = Mode::DirectPush;
  int helper_id = -1;
  double decided_at = 0.0;
  double own_score = 0.0;
  double best_helper_score = 0.0;
};

ModeDecision select_mode(Strategy strategy, const ModeContext& ctx, double decided_at,
                         const PolicyParams& policy);

// Progress an uploading content by elapsed seconds at the given rate. On
// completion the delivery instant is interpolated inside the interval.
void advance_content(Content& c, double interval_start, double elapsed_s, double rate_bps);

DropCause classify_drop(double outage_fraction, double theta_block);

}  // namespace d2dsim
