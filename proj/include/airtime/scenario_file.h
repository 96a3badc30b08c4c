// Scenario files: JSON objects describing a whole experiment.
//
//   {
//     "topology": "g-AP-g X5",          required
//     "seed": 7,
//     "window_ms": 200,
//     "duration_s": 30,
//     "capacity_duration_s": 30,
//     "mode": "fixed" | "adaptive",
//     "rates_mbps": [1, 2, 4, 8],
//     "method": "sp" | "ss" | "both",
//     "phy_rate_mbps": 54,
//     "loss": 0.01,
//     "observation_loss": 0.0,
//     "rts_cts": false,
//     "flow": {"transport": "unreliable" | "reliable",
//              "profile": "cbr" | "vbr" | "saturating",
//              "burstiness": 2.0, "payload_bytes": 1316},
//     "cross": {"start_s": 10, "placement": "via_ap" | "direct"},
//     "schedule": [{"link": 0, "start_s": 10, "loss": 0.1,
//                   "phy_rate_mbps": 24}],
//     "sp": {"p": 0.8},
//     "ss": {"f": 0.444},
//     "adaptation": {"rho": 0.8, "beta": 1.0, "idle_min_ms": 10,
//                    "min_rate_diff_mbps": 0.1, "proc_delay_us": 0,
//                    "overhead_factor": 1.0608}
//   }
//
// Unknown keys are errors. Schedule "link" is the index of a media-path
// hop counted from the source.

#ifndef AIRTIME_SCENARIO_FILE_H_
#define AIRTIME_SCENARIO_FILE_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "airtime/harness.h"

namespace airtime {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Defaults for a topology spec; its seed= extra, if any, becomes
// the seed.
ExperimentConfig ExperimentForTopology(std::string_view spec);

ExperimentConfig ParseScenario(std::string_view json_text);
ExperimentConfig LoadScenarioFile(const std::filesystem::path& path);

}  // namespace airtime

#endif  // AIRTIME_SCENARIO_FILE_H_
