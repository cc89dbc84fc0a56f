// Experiment driver: reproduces the delay sweeps and runs the
// analytic-vs-simulation validation suite. Emits CSV tables plus a JSON run
// manifest per command.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satrelay/satrelay.hpp"

namespace fs = std::filesystem;
using namespace satrelay;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  int workers = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opt) {
  cmd->add_option("--config", opt.config_path, "Scenario config file (INI-style)");
  cmd->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--format", opt.format, "Output format (csv)")->capture_default_str();
  cmd->add_option("--seed", opt.seed, "Override RNG seed")->each([&](const std::string&) {
    opt.seed_set = true;
  });
  cmd->add_option("--trials", opt.trials, "Override Monte-Carlo trial count");
  cmd->add_option("--workers", opt.workers, "Worker threads (0 = auto)");
}

ScenarioConfig resolve_config(const CommonOpts& opt) {
  ScenarioConfig cfg = opt.config_path.empty() ? ScenarioConfig{} : load_config(opt.config_path);
  if (opt.config_path.empty()) {
    // built-in defaults, same as an empty config file
    std::istringstream empty;
    cfg = parse_config(empty, "<defaults>");
  }
  if (opt.seed_set) cfg.seed = opt.seed;
  if (opt.trials > 0) cfg.n_trials = opt.trials;
  if (opt.workers >= 0) cfg.workers = opt.workers;
  if (opt.format != "csv") throw CLI::ValidationError("--format", "only 'csv' is supported");
  return cfg;
}

void write_outputs(const CommonOpts& opt, const std::string& command, const ScenarioConfig& cfg,
                   const CsvTable& table, const std::string& csv_name, double wall_clock_s) {
  fs::create_directories(opt.out_dir);
  const fs::path csv_path = fs::path(opt.out_dir) / csv_name;
  {
    std::ofstream out(csv_path, std::ios::binary);
    out << table.to_string();
  }
  RunManifest manifest;
  manifest.command = command;
  manifest.config = cfg;
  manifest.outputs = {csv_path.string()};
  manifest.wall_clock_s = wall_clock_s;
  std::ofstream mout(fs::path(opt.out_dir) / (command + "_manifest.json"));
  mout << manifest.to_json().dump(2) << "\n";
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "bad list entry '" + item + "'");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (double v : parse_double_list(s, what)) out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-satellite-ground relay transmission-delay toolkit"};
  app.require_subcommand(1);

  CommonOpts opt;

  auto* validate = app.add_subcommand("validate", "Run the analytic-vs-simulation check suite");
  add_common(validate, opt);

  auto* nsat = app.add_subcommand("sweep-nsat", "Delay vs. satellite count and altitude");
  add_common(nsat, opt);
  std::string nsat_list = "200,500,1000";
  std::string alt_list = "500,1000,1500";
  nsat->add_option("--nsats", nsat_list, "Satellite counts")->capture_default_str();
  nsat->add_option("--altitudes-km", alt_list, "Shell altitudes, km")->capture_default_str();

  auto* dist = app.add_subcommand("sweep-distance", "Delay vs. station separation, operator presets");
  add_common(dist, opt);
  std::string dist_list = "500,1000,1500,2000";
  dist->add_option("--distances-km", dist_list, "Ground chord distances, km")->capture_default_str();

  auto* hops = app.add_subcommand("sweep-hops", "Multi-hop long-distance transmission");
  add_common(hops, opt);
  double total_km = 15000.0;
  std::string hop_alts = "500,700,900,1100,1300,1500";
  hops->add_option("--total-distance-km", total_km, "End-to-end ground distance")->capture_default_str();
  hops->add_option("--altitudes-km", hop_alts, "Shell altitudes, km")->capture_default_str();

  auto* relay = app.add_subcommand("relay-sweep", "Delay vs. ideal relay arc position");
  add_common(relay, opt);
  int grid_points = 32;
  relay->add_option("--grid-points", grid_points, "Arc grid resolution")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const ScenarioConfig cfg = resolve_config(opt);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    if (*validate) {
      const ValidationReport rep = run_validation(cfg);
      for (const auto& c : rep.checks) {
        std::cout << (c.gating ? (c.pass ? "pass  " : "FAIL  ") : "info  ") << c.name << " = "
                  << csv_num(c.statistic);
        if (c.gating) std::cout << "  (" << c.relation << " " << csv_num(c.threshold) << ")";
        std::cout << "\n";
      }
      write_outputs(opt, "validate", cfg, rep.to_csv(), "validate.csv", elapsed());
      if (!rep.all_passed()) {
        std::cerr << "validation FAILED\n";
        return 1;
      }
      std::cout << "validation passed\n";
    } else if (*nsat) {
      const CsvTable t = sweep_nsat(cfg, parse_int_list(nsat_list, "--nsats"),
                                    parse_double_list(alt_list, "--altitudes-km"));
      write_outputs(opt, "sweep-nsat", cfg, t, "sweep_nsat.csv", elapsed());
    } else if (*dist) {
      const CsvTable t = sweep_distance(cfg, parse_double_list(dist_list, "--distances-km"));
      write_outputs(opt, "sweep-distance", cfg, t, "sweep_distance.csv", elapsed());
    } else if (*hops) {
      const CsvTable t =
          sweep_hops(cfg, total_km, parse_double_list(hop_alts, "--altitudes-km"));
      write_outputs(opt, "sweep-hops", cfg, t, "sweep_hops.csv", elapsed());
    } else if (*relay) {
      if (grid_points < 2) throw CLI::ValidationError("--grid-points", "need at least 2");
      std::vector<double> grid(static_cast<std::size_t>(grid_points) + 1);
      for (int i = 0; i <= grid_points; ++i)
        grid[static_cast<std::size_t>(i)] = cfg.theta_sep * i / grid_points;
      const CsvTable t = relay_sweep(cfg, grid);
      write_outputs(opt, "relay-sweep", cfg, t, "relay_sweep.csv", elapsed());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
