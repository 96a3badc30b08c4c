// airtime: run bandwidth-estimation experiments on simulated WLAN paths.
//
//   airtime run --topology "g X5" --mode fixed --rates 1,2,4,8 --out out/
//   airtime capacity --topology g-AP-g
//   airtime compare out_a/ out_b/

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "airtime/harness.h"
#include "airtime/network.h"
#include "airtime/report_io.h"
#include "airtime/scenario_file.h"
#include "airtime/topology.h"

namespace {

using namespace airtime;

struct ChannelFlags {
  std::optional<double> loss;
  std::optional<double> phy_rate_mbps;
  std::optional<std::string> placement;
  std::optional<double> cross_start_s;
  std::optional<std::string> transport;
  std::optional<uint64_t> seed;
  std::optional<double> window_ms;
};

void AddChannelFlags(CLI::App* cmd, ChannelFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Random seed");
  cmd->add_option("--window-ms", flags.window_ms,
                  "Measurement window in milliseconds (default 200)");
  cmd->add_option("--loss", flags.loss,
                  "Per-attempt frame loss probability on wireless links");
  cmd->add_option("--phy-rate", flags.phy_rate_mbps,
                  "Wireless phy rate in Mbps (default 54)");
  cmd->add_option("--cross-placement", flags.placement,
                  "Cross traffic path: via_ap (default) or direct")
      ->check(CLI::IsMember({"via_ap", "direct"}));
  cmd->add_option("--cross-start", flags.cross_start_s,
                  "Cross traffic start time in seconds");
  cmd->add_option("--transport", flags.transport,
                  "Media transport: unreliable (default) or reliable")
      ->check(CLI::IsMember({"unreliable", "reliable"}));
}

void ApplyChannelFlags(const ChannelFlags& flags, ExperimentConfig& config) {
  NetworkConfig& net = config.network;
  if (flags.seed) net.seed = *flags.seed;
  if (flags.window_ms) {
    net.window_us = static_cast<TimeUs>(std::llround(*flags.window_ms * 1e3));
    if (config.adaptation) {
      throw std::invalid_argument(
          "--window-ms cannot change a scenario file's adaptation block");
    }
  }
  if (flags.loss) net.wireless.loss_prob = *flags.loss;
  if (flags.phy_rate_mbps) {
    net.wireless.phy_rate_bps =
        static_cast<int64_t>(std::llround(*flags.phy_rate_mbps * 1e6));
  }
  if (flags.placement) {
    net.cross_placement = *flags.placement == "direct"
                              ? CrossPlacement::kDirect
                              : CrossPlacement::kViaAp;
  }
  if (flags.cross_start_s) {
    net.cross_start_us =
        static_cast<TimeUs>(std::llround(*flags.cross_start_s * 1e6));
  }
  if (flags.transport) {
    net.media.transport = *flags.transport == "reliable"
                              ? Transport::kReliableSimplified
                              : Transport::kUnreliable;
  }
}

ExperimentConfig BaseConfig(const std::optional<std::string>& topology,
                            const std::optional<std::string>& scenario) {
  if (topology.has_value() == scenario.has_value()) {
    throw std::invalid_argument(
        "give exactly one of --topology and --scenario");
  }
  return scenario ? LoadScenarioFile(*scenario)
                  : ExperimentForTopology(*topology);
}

std::vector<double> ParseRates(const std::string& list) {
  std::vector<double> rates;
  size_t start = 0;
  while (start <= list.size()) {
    const size_t comma = std::min(list.find(',', start), list.size());
    const std::string item = list.substr(start, comma - start);
    size_t used = 0;
    double mbps = 0.0;
    try {
      mbps = std::stod(item, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (item.empty() || used != item.size() || !(mbps > 0.0)) {
      throw std::invalid_argument("bad rate '" + item + "' in --rates");
    }
    rates.push_back(mbps * 1e6);
    start = comma + 1;
  }
  return rates;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Available-bandwidth estimation experiments on simulated "
               "802.11 paths"};
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand("run", "Run an experiment");
  std::optional<std::string> run_topology, run_scenario, rates, mode, method;
  std::optional<double> duration, capacity_duration;
  std::string out_dir;
  bool plot = false;
  int threads = 1;
  ChannelFlags run_flags;
  run->add_option("--topology", run_topology, "Topology spec, e.g. \"g-AP-g X5\"");
  run->add_option("--scenario", run_scenario, "JSON scenario file");
  run->add_option("--mode", mode, "fixed or adaptive")
      ->check(CLI::IsMember({"fixed", "adaptive"}));
  run->add_option("--rates", rates,
                  "Comma-separated media rates in Mbps (adaptive: start rate)");
  run->add_option("--method", method, "sp, ss or both")
      ->check(CLI::IsMember({"sp", "ss", "both"}));
  run->add_option("--duration", duration, "Run length in seconds (default 30)");
  run->add_option("--capacity-duration", capacity_duration,
                  "Capacity probe length in seconds (default: --duration)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--plot", plot, "Also write plot.svg per cell");
  run->add_option("--threads", threads, "Cells run in parallel")
      ->check(CLI::PositiveNumber);
  AddChannelFlags(run, run_flags);

  // capacity
  CLI::App* capacity = app.add_subcommand(
      "capacity", "Probe path capacity with a saturating flow");
  std::optional<std::string> cap_topology, cap_scenario;
  std::optional<double> cap_duration;
  ChannelFlags cap_flags;
  capacity->add_option("--topology", cap_topology, "Topology spec");
  capacity->add_option("--scenario", cap_scenario, "JSON scenario file");
  capacity->add_option("--duration", cap_duration,
                       "Probe length in seconds (default 30)");
  AddChannelFlags(capacity, cap_flags);

  // compare
  CLI::App* compare =
      app.add_subcommand("compare", "Compare two run output directories");
  std::string left_dir, right_dir;
  compare->add_option("dir1", left_dir, "First output directory")->required();
  compare->add_option("dir2", right_dir, "Second output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig config = BaseConfig(run_topology, run_scenario);
      ApplyChannelFlags(run_flags, config);
      if (mode) config.mode = ParseRunMode(*mode);
      if (method) config.methods = ParseMethodSelection(*method);
      if (rates) config.rates_bps = ParseRates(*rates);
      if (duration) {
        config.duration_s = *duration;
        if (!capacity_duration) config.capacity_duration_s = *duration;
      }
      if (capacity_duration) config.capacity_duration_s = *capacity_duration;
      config.threads = threads;
      const RunReport report = Run(config);
      WriteReport(report, config.band, out_dir, plot);
      std::cout << "capacity_bps " << FormatNumber(report.capacity_bps)
                << "\n";
      for (const CellReport& cell : report.cells) {
        for (const SummaryRow& row : cell.summary) {
          std::cout << cell.name << ' ' << ToString(row.method)
                    << " mean_total_bps " << FormatNumber(row.mean_total_bps)
                    << " in_band " << FormatNumber(row.in_band_fraction)
                    << "\n";
        }
      }
    } else if (capacity->parsed()) {
      ExperimentConfig config = BaseConfig(cap_topology, cap_scenario);
      ApplyChannelFlags(cap_flags, config);
      const double seconds = cap_duration.value_or(config.capacity_duration_s);
      if (!(seconds > 0.0)) throw std::invalid_argument("duration must be > 0");
      const double bps = MeasureCapacity(
          config.network, static_cast<TimeUs>(std::llround(seconds * 1e6)));
      std::cout << FormatNumber(bps) << "\n";
    } else if (compare->parsed()) {
      const LoadedReport left = LoadReport(left_dir);
      const LoadedReport right = LoadReport(right_dir);
      WriteComparison(std::cout, CompareMethods(left.summary, right.summary));
    }
  } catch (const std::exception& e) {
    std::cerr << "airtime: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
