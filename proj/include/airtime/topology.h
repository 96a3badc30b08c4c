// Topology strings for home wireless scenarios.
//
//   spec  := hop ("-" hop)* (" " extra)*
//   hop   := "g" | "a" | "w" | "AP" | "dls"
//   extra := "X" number | "seed=" integer | "ch=" integer ("," integer)*
//
// g and a are 802.11g / 802.11a wireless links, w a wired link, AP a relay
// between two links. "dls" (direct link setup) replaces the preceding
// link-AP-link pair with one direct wireless link that bypasses the AP. Xn
// adds an n Mbps cross-traffic flow on the channel of the first wireless
// hop. ch= assigns channels to the wireless hops in path order; by default
// g links use channel 1 and a links channel 36, so mixed-band paths never
// contend.
//
// Examples: "g", "g-AP-g X5", "a-AP-w", "g-AP-g-dls", "g-AP-g ch=1,6".

#ifndef AIRTIME_TOPOLOGY_H_
#define AIRTIME_TOPOLOGY_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "airtime/wlan_medium.h"

namespace airtime {

class TopologyError : public std::invalid_argument {
 public:
  TopologyError(size_t position, const std::string& message);
  size_t position() const { return position_; }

 private:
  size_t position_;
};

enum class LinkKind { kWireless, kWired };

struct TopologyLink {
  int index = 0;  // position along the media path
  LinkKind kind = LinkKind::kWireless;
  Band band = Band::k11g;
  int channel = 0;  // wireless only
  int from_node = 0;
  int to_node = 0;
};

struct CrossFlowSpec {
  double rate_bps = 0.0;
};

struct Topology {
  static constexpr int kDefaultChannel11g = 1;
  static constexpr int kDefaultChannel11a = 36;

  std::vector<std::string> node_names;  // 0 is the media source
  std::vector<TopologyLink> links;      // media path, source to sink
  std::vector<CrossFlowSpec> cross_flows;
  std::optional<uint64_t> seed;

  // Canonical form of what was parsed, for round-tripping.
  std::vector<std::string> hop_tokens;
  struct CrossExtra { double mbps; };
  struct SeedExtra { uint64_t value; };
  struct ChannelsExtra { std::vector<int> channels; };
  std::vector<std::variant<CrossExtra, SeedExtra, ChannelsExtra>> extras;

  int source() const { return 0; }
  int sink() const { return links.back().to_node; }
  int WirelessHops() const;
  const TopologyLink& FirstWireless() const;
  // Wireless hops of the path sharing the first wireless hop's channel.
  int ContendingHops() const;
};

// Throws TopologyError with the offending character offset.
Topology ParseTopology(std::string_view spec);
std::string Unparse(const Topology& topology);
// Lexical canonical form: single spaces, numbers in shortest form.
// Throws TopologyError on malformed numbers.
std::string NormalizeTopologySpec(std::string_view spec);

std::string FormatNumber(double value);

}  // namespace airtime

#endif  // AIRTIME_TOPOLOGY_H_
