#include "airtime/scenario_file.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace airtime {
namespace {

using nlohmann::json;

void CheckKeys(const json& object, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!object.is_object()) throw ScenarioError(where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) {
      throw ScenarioError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T Get(const json& object, const char* key, T fallback) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ScenarioError(std::string("bad value for '") + key + "'");
  }
}

int64_t MbpsToBps(double mbps) {
  return static_cast<int64_t>(std::llround(mbps * 1e6));
}

TimeUs SecondsToUs(double seconds) {
  return static_cast<TimeUs>(std::llround(seconds * 1e6));
}

}  // namespace

ExperimentConfig ExperimentForTopology(std::string_view spec) {
  ExperimentConfig config;
  config.network.topology = ParseTopology(spec);
  config.scenario = NormalizeTopologySpec(spec);
  if (config.network.topology.seed) {
    config.network.seed = *config.network.topology.seed;
  }
  return config;
}

ExperimentConfig ParseScenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") +
                        e.what());
  }
  CheckKeys(root,
            {"topology", "seed", "window_ms", "duration_s",
             "capacity_duration_s", "mode", "rates_mbps", "method",
             "phy_rate_mbps", "loss", "observation_loss", "rts_cts", "flow",
             "cross", "schedule", "sp", "ss", "adaptation"},
            "scenario");
  if (!root.contains("topology")) throw ScenarioError("topology is required");
  ExperimentConfig config =
      ExperimentForTopology(Get<std::string>(root, "topology", ""));
  NetworkConfig& net = config.network;

  net.seed = Get<uint64_t>(root, "seed", net.seed);
  net.window_us = static_cast<TimeUs>(
      std::llround(Get<double>(root, "window_ms", 200.0) * 1e3));
  config.duration_s = Get<double>(root, "duration_s", config.duration_s);
  config.capacity_duration_s =
      Get<double>(root, "capacity_duration_s", config.duration_s);
  config.mode = ParseRunMode(Get<std::string>(root, "mode", "fixed"));
  config.methods = ParseMethodSelection(Get<std::string>(root, "method", "both"));
  for (double mbps : Get<std::vector<double>>(root, "rates_mbps", {})) {
    config.rates_bps.push_back(mbps * 1e6);
  }
  net.wireless.phy_rate_bps =
      MbpsToBps(Get<double>(root, "phy_rate_mbps", 54.0));
  net.wireless.loss_prob = Get<double>(root, "loss", 0.0);
  net.observation_loss = Get<double>(root, "observation_loss", 0.0);
  net.mac.rts_cts = Get<bool>(root, "rts_cts", false);

  if (root.contains("flow")) {
    const json& flow = root["flow"];
    CheckKeys(flow, {"transport", "profile", "burstiness", "payload_bytes"},
              "flow");
    const std::string transport = Get<std::string>(flow, "transport",
                                                   "unreliable");
    if (transport == "unreliable") {
      net.media.transport = Transport::kUnreliable;
    } else if (transport == "reliable") {
      net.media.transport = Transport::kReliableSimplified;
    } else {
      throw ScenarioError("transport must be unreliable or reliable");
    }
    const std::string profile = Get<std::string>(flow, "profile", "cbr");
    if (profile == "cbr") {
      net.media.profile = ProfileKind::kCbr;
    } else if (profile == "vbr") {
      net.media.profile = ProfileKind::kVbr;
    } else if (profile == "saturating") {
      net.media.profile = ProfileKind::kSaturating;
    } else {
      throw ScenarioError("profile must be cbr, vbr or saturating");
    }
    net.media.burstiness = Get<double>(flow, "burstiness", 2.0);
    net.media.datagram_payload_bytes =
        Get<int64_t>(flow, "payload_bytes", net.media.datagram_payload_bytes);
  }

  if (root.contains("cross")) {
    const json& cross = root["cross"];
    CheckKeys(cross, {"start_s", "placement"}, "cross");
    net.cross_start_us = SecondsToUs(Get<double>(cross, "start_s", 0.0));
    const std::string placement =
        Get<std::string>(cross, "placement", "via_ap");
    if (placement == "via_ap") {
      net.cross_placement = CrossPlacement::kViaAp;
    } else if (placement == "direct") {
      net.cross_placement = CrossPlacement::kDirect;
    } else {
      throw ScenarioError("cross placement must be via_ap or direct");
    }
  }

  if (root.contains("schedule")) {
    if (!root["schedule"].is_array()) {
      throw ScenarioError("schedule must be an array");
    }
    for (const json& entry : root["schedule"]) {
      CheckKeys(entry, {"link", "start_s", "loss", "phy_rate_mbps"},
                "schedule entry");
      LinkSegment segment;
      segment.start_us = SecondsToUs(Get<double>(entry, "start_s", 0.0));
      segment.conditions.loss_prob =
          Get<double>(entry, "loss", net.wireless.loss_prob);
      segment.conditions.phy_rate_bps = MbpsToBps(Get<double>(
          entry, "phy_rate_mbps",
          static_cast<double>(net.wireless.phy_rate_bps) / 1e6));
      net.schedules[Get<int>(entry, "link", 0)].push_back(segment);
    }
  }

  if (root.contains("sp")) {
    CheckKeys(root["sp"], {"p"}, "sp");
    if (root["sp"].contains("p")) config.sp_p = Get<double>(root["sp"], "p", 0);
  }
  if (root.contains("ss")) {
    CheckKeys(root["ss"], {"f"}, "ss");
    if (root["ss"].contains("f")) config.ss_f = Get<double>(root["ss"], "f", 0);
  }
  if (root.contains("adaptation")) {
    const json& a = root["adaptation"];
    CheckKeys(a,
              {"rho", "beta", "idle_min_ms", "min_rate_diff_mbps",
               "proc_delay_us", "overhead_factor"},
              "adaptation");
    AdaptationParams params = AdaptationParams::ForWindow(net.window_us);
    params.rho = Get<double>(a, "rho", params.rho);
    params.beta = Get<double>(a, "beta", params.beta);
    if (a.contains("idle_min_ms")) {
      params.idle_min_threshold_us = static_cast<TimeUs>(
          std::llround(Get<double>(a, "idle_min_ms", 0) * 1e3));
    }
    params.min_rate_diff_threshold_bps =
        Get<double>(a, "min_rate_diff_mbps",
                    params.min_rate_diff_threshold_bps / 1e6) * 1e6;
    params.packet_proc_delay_us =
        Get<TimeUs>(a, "proc_delay_us", params.packet_proc_delay_us);
    params.app_overhead_factor =
        Get<double>(a, "overhead_factor", params.app_overhead_factor);
    config.adaptation = params;
  }
  config.network.Validate();
  return config;
}

ExperimentConfig LoadScenarioFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParseScenario(text.str());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

}  // namespace airtime
