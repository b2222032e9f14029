#include "d2dsim/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "d2dsim/svg.hpp"

namespace d2dsim {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Direct:
      return "direct";
    case Strategy::DirectWithStorage:
      return "storage";
    case Strategy::Predictive:
      return "predictive";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "direct") return Strategy::Direct;
  if (name == "storage") return Strategy::DirectWithStorage;
  if (name == "predictive") return Strategy::Predictive;
  throw std::invalid_argument("unknown strategy: " + name);
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (spec.strategies.empty() || spec.interarrivals_s.empty())
    throw std::invalid_argument("sweep needs at least one strategy and interarrival");

  SweepResult result;
  for (Strategy s : spec.strategies)
    for (double ia : spec.interarrivals_s)
      for (int r = 0; r < spec.runs; ++r) {
        SweepRow row;
        row.strategy = s;
        row.interarrival_s = ia;
        row.run = r;
        row.seed = spec.base.seed + static_cast<uint64_t>(r);
        result.rows.push_back(row);
      }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= result.rows.size()) return;
      SweepRow& row = result.rows[i];
      SimConfig cfg = spec.base;
      cfg.strategy = row.strategy;
      cfg.traffic.interarrival_s = row.interarrival_s;
      cfg.seed = row.seed;
      row.metrics = run_simulation(cfg);
    }
  };
  const int n_threads = std::max(1, spec.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (Strategy s : spec.strategies)
    for (double ia : spec.interarrivals_s) {
      std::vector<double> blockf, ratef, totalf, delay;
      for (const SweepRow& row : result.rows) {
        if (row.strategy != s || row.interarrival_s != ia) continue;
        blockf.push_back(row.metrics.blockage_drop_fraction());
        ratef.push_back(row.metrics.rate_drop_fraction());
        totalf.push_back(row.metrics.drop_fraction());
        delay.push_back(row.metrics.mean_delay_s);
      }
      AggregateRow cell;
      cell.strategy = s;
      cell.interarrival_s = ia;
      cell.runs = static_cast<int>(blockf.size());
      cell.drop_blockage = aggregate(blockf);
      cell.drop_rate = aggregate(ratef);
      cell.drop_total = aggregate(totalf);
      cell.mean_delay_s = aggregate(delay);
      result.cells.push_back(cell);
    }
  return result;
}

std::string per_run_csv(const SweepResult& r) {
  std::string out =
      "strategy,interarrival_ms,run,seed,n_generated,n_delivered,drop_blockage,"
      "drop_rate,mean_delay_ms,censored,stored,forwarded,handoff_aborts,max_delay_ms\n";
  for (const SweepRow& row : r.rows) {
    const RunMetrics& m = row.metrics;
    out += strategy_name(row.strategy);
    out += ',' + fmt_g(row.interarrival_s * 1e3);
    out += ',' + std::to_string(row.run);
    out += ',' + std::to_string(row.seed);
    out += ',' + std::to_string(m.generated);
    out += ',' + std::to_string(m.delivered);
    out += ',' + std::to_string(m.dropped_blockage);
    out += ',' + std::to_string(m.dropped_insufficient);
    out += ',' + fmt_g(m.mean_delay_s * 1e3);
    out += ',' + std::to_string(m.censored);
    out += ',' + std::to_string(m.stored);
    out += ',' + std::to_string(m.forwarded);
    out += ',' + std::to_string(m.handoff_aborts);
    out += ',' + fmt_g(m.max_delay_s * 1e3);
    out += '\n';
  }
  return out;
}

std::string aggregate_csv(const SweepResult& r) {
  std::string out =
      "strategy,interarrival_ms,runs,drop_blockage_mean,drop_blockage_ci95,"
      "drop_rate_mean,drop_rate_ci95,drop_total_mean,drop_total_ci95,"
      "mean_delay_ms_mean,mean_delay_ms_ci95\n";
  for (const AggregateRow& c : r.cells) {
    out += strategy_name(c.strategy);
    out += ',' + fmt_g(c.interarrival_s * 1e3);
    out += ',' + std::to_string(c.runs);
    out += ',' + fmt_g(c.drop_blockage.mean);
    out += ',' + fmt_g(c.drop_blockage.ci95);
    out += ',' + fmt_g(c.drop_rate.mean);
    out += ',' + fmt_g(c.drop_rate.ci95);
    out += ',' + fmt_g(c.drop_total.mean);
    out += ',' + fmt_g(c.drop_total.ci95);
    out += ',' + fmt_g(c.mean_delay_s.mean * 1e3);
    out += ',' + fmt_g(c.mean_delay_s.ci95 * 1e3);
    out += '\n';
  }
  return out;
}

std::vector<AggregateRow> parse_aggregate_csv(const std::string& csv) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < csv.size()) {
    size_t end = csv.find('\n', start);
    if (end == std::string::npos) end = csv.size();
    if (end > start) lines.push_back(csv.substr(start, end - start));
    start = end + 1;
  }
  if (lines.empty() ||
      lines[0] !=
          "strategy,interarrival_ms,runs,drop_blockage_mean,drop_blockage_ci95,"
          "drop_rate_mean,drop_rate_ci95,drop_total_mean,drop_total_ci95,"
          "mean_delay_ms_mean,mean_delay_ms_ci95")
    throw std::invalid_argument("not an aggregate results CSV");

  auto stat = [](double mean, double ci, int runs) {
    Stat s;
    s.mean = mean;
    s.ci95 = ci;
    s.sd = runs > 1 ? ci * std::sqrt(static_cast<double>(runs)) / 1.96 : 0.0;
    return s;
  };
  std::vector<AggregateRow> cells;
  for (size_t li = 1; li < lines.size(); ++li) {
    std::vector<std::string> fields;
    size_t pos = 0;
    for (;;) {
      const size_t comma = lines[li].find(',', pos);
      fields.push_back(lines[li].substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 11)
      throw std::invalid_argument("aggregate CSV row " + std::to_string(li) +
                                  ": expected 11 fields");
    double v[10];
    try {
      for (int i = 0; i < 10; ++i) v[i] = std::stod(fields[static_cast<size_t>(i) + 1]);
    } catch (const std::exception&) {
      throw std::invalid_argument("aggregate CSV row " + std::to_string(li) + ": bad number");
    }
    AggregateRow c;
    c.strategy = parse_strategy(fields[0]);
    c.interarrival_s = v[0] * 1e-3;
    c.runs = static_cast<int>(v[1]);
    c.drop_blockage = stat(v[2], v[3], c.runs);
    c.drop_rate = stat(v[4], v[5], c.runs);
    c.drop_total = stat(v[6], v[7], c.runs);
    c.mean_delay_s = stat(v[8] * 1e-3, v[9] * 1e-3, c.runs);
    cells.push_back(c);
  }
  return cells;
}

namespace {

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
  double ci = 0.0;
};

const char* kSeriesColor[] = {"#d62728", "#1f77b4", "#2ca02c"};

std::string line_plot(const std::vector<AggregateRow>& cells, const std::string& title,
                      const std::string& y_label,
                      Stat AggregateRow::*field, double scale) {
  const double w = 640.0, h = 420.0;
  const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;
  const double pw = w - ml - mr, ph = h - mt - mb;

  std::vector<Strategy> strategies;
  for (const AggregateRow& c : cells)
    if (std::find(strategies.begin(), strategies.end(), c.strategy) == strategies.end())
      strategies.push_back(c.strategy);

  double x_min = 1e300, x_max = -1e300, y_max = 0.0;
  for (const AggregateRow& c : cells) {
    const double x = c.interarrival_s * 1e3;
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_max = std::max(y_max, ((c.*field).mean + (c.*field).ci95) * scale);
  }
  if (cells.empty()) {
    x_min = 0.0;
    x_max = 1.0;
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return mt + ph - y / y_max * ph; };

  Svg svg(w, h);
  svg.rect(0, 0, w, h, "white");
  svg.text(w / 2.0, 22.0, title, 15.0, "middle");
  svg.line(ml, mt, ml, mt + ph, "#333");
  svg.line(ml, mt + ph, ml + pw, mt + ph, "#333");
  svg.text(w / 2.0, h - 12.0, "interarrival (ms)", 12.0, "middle");
  svg.text(14.0, mt - 14.0, y_label, 12.0);

  for (int g = 0; g <= 4; ++g) {
    const double y = y_max * g / 4.0;
    svg.line(ml, py(y), ml + pw, py(y), "#ddd", 0.5);
    svg.text(ml - 6.0, py(y) + 4.0, fmt_g(y), 10.0, "end");
  }

  for (size_t si = 0; si < strategies.size(); ++si) {
    std::vector<SeriesPoint> pts;
    for (const AggregateRow& c : cells) {
      if (c.strategy != strategies[si]) continue;
      pts.push_back({c.interarrival_s * 1e3, (c.*field).mean * scale, (c.*field).ci95 * scale});
    }
    std::sort(pts.begin(), pts.end(),
              [](const SeriesPoint& a, const SeriesPoint& b) { return a.x < b.x; });
    const std::string color = kSeriesColor[si % 3];
    for (const SeriesPoint& p : pts) {
      if (p.ci <= 0.0) continue;
      svg.line(px(p.x), py(std::max(0.0, p.y - p.ci)), px(p.x), py(p.y + p.ci), color, 1.0);
    }
    svg.polyline_begin(color, 2.0);
    for (const SeriesPoint& p : pts) svg.polyline_point(px(p.x), py(p.y));
    svg.polyline_end();
    for (const SeriesPoint& p : pts)
      svg.rect(px(p.x) - 2.5, py(p.y) - 2.5, 5.0, 5.0, color);
    // x tick labels follow the first series' points
    if (si == 0)
      for (const SeriesPoint& p : pts)
        svg.text(px(p.x), mt + ph + 16.0, fmt_g(p.x), 10.0, "middle");
    const double ly = mt + 14.0 + 16.0 * si;
    svg.line(ml + pw - 130.0, ly - 4.0, ml + pw - 106.0, ly - 4.0, color, 2.0);
    svg.text(ml + pw - 100.0, ly, strategy_name(strategies[si]), 11.0);
  }
  return svg.finish();
}

}  // namespace

std::string blockage_plot_svg(const std::vector<AggregateRow>& cells) {
  return line_plot(cells, "Data dropped by blockage", "drop fraction",
                   &AggregateRow::drop_blockage, 1.0);
}

std::string rate_plot_svg(const std::vector<AggregateRow>& cells) {
  return line_plot(cells, "Data dropped by insufficient rate", "drop fraction",
                   &AggregateRow::drop_rate, 1.0);
}

std::string delay_plot_svg(const std::vector<AggregateRow>& cells) {
  return line_plot(cells, "Mean delivery delay", "delay (ms)", &AggregateRow::mean_delay_s,
                   1e3);
}

}  // namespace d2dsim
