#pragma once

#include <string>
#include <vector>

#include "d2dsim/engine.hpp"

namespace d2dsim {

struct SweepSpec {
  SimConfig base;
  std::vector<Strategy> strategies;
  std::vector<double> interarrivals_s;
  int runs = 1;
  int threads = 1;
};

// One replicate of one sweep cell.
struct SweepRow {
  Strategy strategy = Strategy::Direct;
  double interarrival_s = 0.0;
  int run = 0;
  uint64_t seed = 0;
  RunMetrics metrics;
};

// Replicate statistics for one (strategy, interarrival) cell. Drop stats are
// fractions of decided (non-censored) traffic, split by cause.
struct AggregateRow {
  Strategy strategy = Strategy::Direct;
  double interarrival_s = 0.0;
  int runs = 0;
  Stat drop_blockage;
  Stat drop_rate;
  Stat drop_total;
  Stat mean_delay_s;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<AggregateRow> cells;
};

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);  // throws on an unknown name

// Replicate r of every cell reuses seed base.seed + r, so strategies are
// compared on identical traffic and trajectories. Rows come back in
// (strategy, interarrival, run) order regardless of thread count.
SweepResult run_sweep(const SweepSpec& spec);

std::string per_run_csv(const SweepResult& r);
std::string aggregate_csv(const SweepResult& r);

// Inverse of aggregate_csv, so plots can be rebuilt from the file alone.
std::vector<AggregateRow> parse_aggregate_csv(const std::string& csv);

// Aggregate curves against the interarrival time, one series per strategy,
// with 95% interval whiskers.
std::string blockage_plot_svg(const std::vector<AggregateRow>& cells);
std::string rate_plot_svg(const std::vector<AggregateRow>& cells);
std::string delay_plot_svg(const std::vector<AggregateRow>& cells);

}  // namespace d2dsim
