#include "d2dsim/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/program_options.hpp>

#include "d2dsim/losmap.hpp"
#include "d2dsim/report.hpp"
#include "d2dsim/scenario.hpp"
#include "d2dsim/svg.hpp"

namespace po = boost::program_options;
namespace fs = std::filesystem;

namespace d2dsim {
namespace {

const char* kUsage =
    "usage: d2dsim <command> [options]\n"
    "\n"
    "commands:\n"
    "  generate-default --out PATH       write the built-in factory scenario\n"
    "  run --scenario PATH --out DIR     sweep strategies x interarrival times\n"
    "      [--strategies LIST] [--interarrival-ms LIST] [--runs N] [--seed N]\n"
    "      [--threads N]\n"
    "  losmap --scenario PATH --out DIR  LoS heat map and per-device traces\n"
    "      [--grid-res M] [--samples N]\n";

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  f.flush();
  if (!f) throw std::runtime_error("failed while writing " + p.string());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end - start));
    if (end == std::string::npos) return out;
    start = end + 1;
  }
}

std::vector<double> parse_ms_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split(s, ',')) {
    double v = 0.0;
    size_t used = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v > 0.0))
      throw std::invalid_argument("--interarrival-ms: bad value \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

std::vector<Strategy> parse_strategies(const std::string& s) {
  std::vector<Strategy> out;
  for (const std::string& item : split(s, ',')) {
    const Strategy st = parse_strategy(item);
    for (Strategy seen : out)
      if (seen == st) throw std::invalid_argument("--strategies: duplicate \"" + item + "\"");
    out.push_back(st);
  }
  return out;
}

SimConfig load_scenario(const std::string& path) {
  return scenario_from_json(read_file(path));
}

int cmd_generate_default(const std::vector<std::string>& args, std::ostream& out) {
  po::options_description desc("generate-default options");
  desc.add_options()("help,h", "show this help")(
      "out", po::value<std::string>()->required(), "output scenario path");
  po::variables_map vm;
  po::store(po::command_line_parser(args).options(desc).run(), vm);
  if (vm.count("help")) {
    out << desc;
    return 0;
  }
  po::notify(vm);
  const std::string path = vm["out"].as<std::string>();
  write_file(path, scenario_to_json(default_scenario()));
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_run(const std::vector<std::string>& args, std::ostream& out) {
  po::options_description desc("run options");
  desc.add_options()("help,h", "show this help")(
      "scenario", po::value<std::string>()->required(), "scenario JSON path")(
      "strategies", po::value<std::string>()->default_value("direct,storage,predictive"),
      "comma-separated strategies")(
      "interarrival-ms",
      po::value<std::string>()->default_value("5,10,15,20,25,30,35,40,45,50"),
      "comma-separated interarrival times in ms")(
      "runs", po::value<int>()->default_value(5), "replicates per sweep cell")(
      "seed", po::value<uint64_t>(), "override the scenario base seed")(
      "out", po::value<std::string>()->required(), "output directory")(
      "threads", po::value<int>()->default_value(1), "parallel runs");
  po::variables_map vm;
  po::store(po::command_line_parser(args).options(desc).run(), vm);
  if (vm.count("help")) {
    out << desc;
    return 0;
  }
  po::notify(vm);

  SweepSpec spec;
  spec.base = load_scenario(vm["scenario"].as<std::string>());
  spec.strategies = parse_strategies(vm["strategies"].as<std::string>());
  for (double ms : parse_ms_list(vm["interarrival-ms"].as<std::string>()))
    spec.interarrivals_s.push_back(ms * 1e-3);
  spec.runs = vm["runs"].as<int>();
  spec.threads = vm["threads"].as<int>();
  if (vm.count("seed")) spec.base.seed = vm["seed"].as<uint64_t>();
  if (spec.runs < 1) throw std::invalid_argument("--runs: must be at least 1");
  if (spec.threads < 1) throw std::invalid_argument("--threads: must be at least 1");

  const SweepResult result = run_sweep(spec);

  const fs::path dir = vm["out"].as<std::string>();
  fs::create_directories(dir);
  write_file(dir / "runs.csv", per_run_csv(result));
  const std::string agg = aggregate_csv(result);
  write_file(dir / "aggregate.csv", agg);
  // plots are rebuilt from the CSV text, so the file alone reproduces them
  const std::vector<AggregateRow> cells = parse_aggregate_csv(agg);
  write_file(dir / "drop_blockage.svg", blockage_plot_svg(cells));
  write_file(dir / "drop_rate.svg", rate_plot_svg(cells));
  write_file(dir / "delay.svg", delay_plot_svg(cells));
  out << "wrote " << (dir / "runs.csv").string() << " (" << result.rows.size() << " rows)\n";
  out << "wrote " << (dir / "aggregate.csv").string() << " (" << result.cells.size()
      << " cells)\n";
  for (const char* name : {"drop_blockage.svg", "drop_rate.svg", "delay.svg"})
    out << "wrote " << (dir / name).string() << "\n";
  return 0;
}

int cmd_losmap(const std::vector<std::string>& args, std::ostream& out) {
  po::options_description desc("losmap options");
  desc.add_options()("help,h", "show this help")(
      "scenario", po::value<std::string>()->required(), "scenario JSON path")(
      "out", po::value<std::string>()->required(), "output directory")(
      "grid-res", po::value<double>()->default_value(0.25), "heat map cell size in m")(
      "samples", po::value<int>()->default_value(10000), "Monte Carlo samples per cell");
  po::variables_map vm;
  po::store(po::command_line_parser(args).options(desc).run(), vm);
  if (vm.count("help")) {
    out << desc;
    return 0;
  }
  po::notify(vm);

  const SimConfig cfg = load_scenario(vm["scenario"].as<std::string>());
  const double grid_res = vm["grid-res"].as<double>();
  const int samples = vm["samples"].as<int>();
  if (!(grid_res > 0.0)) throw std::invalid_argument("--grid-res: must be positive");
  if (samples < 1) throw std::invalid_argument("--samples: must be at least 1");

  const double plane =
      cfg.scene.devices.empty() ? 1.0 : cfg.scene.devices[0].antenna_height_m;
  const LosMap map = build_infra_los_map(cfg.scene, grid_res, plane, samples, cfg.seed);

  const double period = mobility_period(cfg.scene);
  const double t_end = period > 0.0 ? period : 1.0;
  std::vector<std::pair<std::string, LosTrace>> traces;
  for (const DeviceSpec& d : cfg.scene.devices)
    traces.emplace_back("dev" + std::to_string(d.id),
                        build_los_trace(cfg.scene, LinkEnd::bs(), LinkEnd::dev(d.id), 1e-3,
                                        t_end, false, 0, cfg.seed));

  std::string traces_csv = "t_s";
  for (size_t k = 0; k < traces.size(); ++k) traces_csv += "," + traces[k].first;
  traces_csv += "\n";
  if (!traces.empty()) {
    const int n = traces[0].second.n();
    for (int i = 0; i < n; ++i) {
      traces_csv += fmt_g(static_cast<double>(i) * traces[0].second.dt);
      for (size_t k = 0; k < traces.size(); ++k)
        traces_csv += "," + fmt_g(traces[k].second.p[static_cast<size_t>(i)]);
      traces_csv += "\n";
    }
  }

  const fs::path dir = vm["out"].as<std::string>();
  fs::create_directories(dir);
  write_file(dir / "losmap.csv", losmap_to_csv(map));
  write_file(dir / "losmap.svg", losmap_to_svg(map));
  write_file(dir / "traces.csv", traces_csv);
  write_file(dir / "traces.svg", traces_to_svg(traces));
  out << "wrote " << (dir / "losmap.csv").string() << " (" << map.nx << "x" << map.ny
      << " cells)\n";
  for (const char* name : {"losmap.svg", "traces.csv", "traces.svg"})
    out << "wrote " << (dir / name).string() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << kUsage;
    return 2;
  }
  const std::string cmd = args[0];
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  try {
    if (cmd == "generate-default") return cmd_generate_default(rest, out);
    if (cmd == "run") return cmd_run(rest, out);
    if (cmd == "losmap") return cmd_losmap(rest, out);
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
      out << kUsage;
      return 0;
    }
    err << "unknown command \"" << cmd << "\"\n" << kUsage;
    return 2;
  } catch (const po::error& e) {
    err << cmd << ": " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << cmd << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << cmd << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace d2dsim
