#include "airtime/topology.h"

#include <charconv>
#include <cmath>
#include <sstream>

namespace airtime {

TopologyError::TopologyError(size_t position, const std::string& message)
    : std::invalid_argument("topology error at " + std::to_string(position) +
                            ": " + message),
      position_(position) {}

int Topology::WirelessHops() const {
  int hops = 0;
  for (const TopologyLink& link : links) {
    if (link.kind == LinkKind::kWireless) ++hops;
  }
  return hops;
}

const TopologyLink& Topology::FirstWireless() const {
  for (const TopologyLink& link : links) {
    if (link.kind == LinkKind::kWireless) return link;
  }
  throw std::logic_error("topology has no wireless hop");
}

int Topology::ContendingHops() const {
  const int channel = FirstWireless().channel;
  int hops = 0;
  for (const TopologyLink& link : links) {
    if (link.kind == LinkKind::kWireless && link.channel == channel) ++hops;
  }
  return hops;
}

std::string FormatNumber(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

namespace {

struct Word {
  std::string_view text;
  size_t position;
};

std::vector<Word> SplitOn(std::string_view text, size_t base, char separator,
                          bool skip_empty) {
  std::vector<Word> words;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == separator) {
      if (i > start || !skip_empty) {
        words.push_back({text.substr(start, i - start), base + start});
      }
      start = i + 1;
    }
  }
  return words;
}

std::vector<Word> SplitWhitespace(std::string_view text) {
  std::vector<Word> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    const size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) words.push_back({text.substr(start, i - start), start});
  }
  return words;
}

double ParseDouble(const Word& word) {
  double value = 0.0;
  const char* first = word.text.data();
  const char* last = first + word.text.size();
  auto [end, ec] = std::from_chars(first, last, value);
  if (word.text.empty() || ec != std::errc() || end != last ||
      !std::isfinite(value)) {
    throw TopologyError(word.position,
                        "'" + std::string(word.text) + "' is not a number");
  }
  return value;
}

template <class Int>
Int ParseInt(const Word& word) {
  Int value = 0;
  const char* first = word.text.data();
  const char* last = first + word.text.size();
  auto [end, ec] = std::from_chars(first, last, value);
  if (word.text.empty() || ec != std::errc() || end != last) {
    throw TopologyError(word.position,
                        "'" + std::string(word.text) + "' is not an integer");
  }
  return value;
}

bool IsLinkToken(std::string_view token) {
  return token == "g" || token == "a" || token == "w";
}

struct PathLink {
  LinkKind kind;
  Band band;
  size_t position;
};

}  // namespace

Topology ParseTopology(std::string_view spec) {
  const std::vector<Word> words = SplitWhitespace(spec);
  if (words.empty()) throw TopologyError(0, "empty topology");

  Topology topology;
  topology.node_names.push_back("src");

  // Path: alternate link / AP, with dls folding the last link-AP-link.
  std::vector<PathLink> path_links;
  std::vector<int> relays;  // node between path_links[i] and [i + 1]
  std::vector<size_t> relay_positions;
  int ap_count = 0;
  bool expect_link = true;
  const std::vector<Word> hops = SplitOn(words[0].text, words[0].position, '-',
                                         /*skip_empty=*/false);
  for (const Word& hop : hops) {
    if (hop.text.empty()) throw TopologyError(hop.position, "empty hop");
    if (IsLinkToken(hop.text)) {
      if (!expect_link) {
        throw TopologyError(hop.position,
                            "consecutive links need an AP between them");
      }
      if (hop.text == "w") {
        path_links.push_back({LinkKind::kWired, Band::k11g, hop.position});
      } else {
        path_links.push_back({LinkKind::kWireless,
                              hop.text == "a" ? Band::k11a : Band::k11g,
                              hop.position});
      }
      expect_link = false;
    } else if (hop.text == "AP") {
      if (expect_link) {
        throw TopologyError(hop.position, "AP must sit between two links");
      }
      relays.push_back(static_cast<int>(topology.node_names.size()));
      relay_positions.push_back(hop.position);
      topology.node_names.push_back("ap" + std::to_string(++ap_count));
      expect_link = true;
    } else if (hop.text == "dls") {
      if (expect_link || path_links.size() < 2 ||
          relays.size() < path_links.size() - 1 || relays.empty()) {
        throw TopologyError(hop.position,
                            "dls needs a preceding link-AP-link pair");
      }
      const PathLink second = path_links.back();
      const PathLink first = path_links[path_links.size() - 2];
      if (first.kind != LinkKind::kWireless ||
          second.kind != LinkKind::kWireless) {
        throw TopologyError(hop.position, "dls needs two wireless hops");
      }
      if (first.band != second.band) {
        throw TopologyError(hop.position, "dls hops must share a band");
      }
      path_links.pop_back();
      relays.pop_back();
      relay_positions.pop_back();
    } else {
      throw TopologyError(hop.position,
                          "unknown hop '" + std::string(hop.text) + "'");
    }
    topology.hop_tokens.emplace_back(hop.text);
  }
  if (expect_link) {
    throw TopologyError(words[0].position + words[0].text.size(),
                        "path must end with a link");
  }

  const int sink = static_cast<int>(topology.node_names.size());
  topology.node_names.push_back("dst");
  for (size_t i = 0; i < path_links.size(); ++i) {
    TopologyLink link;
    link.index = static_cast<int>(i);
    link.kind = path_links[i].kind;
    link.band = path_links[i].band;
    link.from_node = i == 0 ? 0 : relays[i - 1];
    link.to_node = i + 1 == path_links.size() ? sink : relays[i];
    if (link.kind == LinkKind::kWireless) {
      link.channel = link.band == Band::k11a ? Topology::kDefaultChannel11a
                                             : Topology::kDefaultChannel11g;
    }
    topology.links.push_back(link);
  }
  if (topology.WirelessHops() == 0) {
    throw TopologyError(words[0].position, "path has no wireless hop");
  }

  for (size_t w = 1; w < words.size(); ++w) {
    const Word& word = words[w];
    if (word.text.starts_with("X")) {
      const double mbps = ParseDouble({word.text.substr(1), word.position + 1});
      if (!(mbps > 0.0)) {
        throw TopologyError(word.position + 1, "cross traffic must be > 0");
      }
      topology.cross_flows.push_back({mbps * 1e6});
      topology.extras.emplace_back(Topology::CrossExtra{mbps});
    } else if (word.text.starts_with("seed=")) {
      const uint64_t seed =
          ParseInt<uint64_t>({word.text.substr(5), word.position + 5});
      topology.seed = seed;
      topology.extras.emplace_back(Topology::SeedExtra{seed});
    } else if (word.text.starts_with("ch=")) {
      Topology::ChannelsExtra extra;
      for (const Word& item : SplitOn(word.text.substr(3), word.position + 3,
                                      ',', /*skip_empty=*/false)) {
        const int channel = ParseInt<int>(item);
        if (channel <= 0) throw TopologyError(item.position, "bad channel");
        extra.channels.push_back(channel);
      }
      if (static_cast<int>(extra.channels.size()) != topology.WirelessHops()) {
        throw TopologyError(word.position,
                            "ch= lists " + std::to_string(extra.channels.size()) +
                                " channels for " +
                                std::to_string(topology.WirelessHops()) +
                                " wireless hops");
      }
      size_t next = 0;
      for (TopologyLink& link : topology.links) {
        if (link.kind == LinkKind::kWireless) {
          link.channel = extra.channels[next++];
        }
      }
      topology.extras.emplace_back(std::move(extra));
    } else {
      throw TopologyError(word.position,
                          "unknown option '" + std::string(word.text) + "'");
    }
  }
  return topology;
}

std::string Unparse(const Topology& topology) {
  std::ostringstream out;
  for (size_t i = 0; i < topology.hop_tokens.size(); ++i) {
    if (i > 0) out << '-';
    out << topology.hop_tokens[i];
  }
  for (const auto& extra : topology.extras) {
    out << ' ';
    if (const auto* cross = std::get_if<Topology::CrossExtra>(&extra)) {
      out << 'X' << FormatNumber(cross->mbps);
    } else if (const auto* seed = std::get_if<Topology::SeedExtra>(&extra)) {
      out << "seed=" << seed->value;
    } else {
      const auto& channels = std::get<Topology::ChannelsExtra>(extra);
      out << "ch=";
      for (size_t i = 0; i < channels.channels.size(); ++i) {
        if (i > 0) out << ',';
        out << channels.channels[i];
      }
    }
  }
  return out.str();
}

std::string NormalizeTopologySpec(std::string_view spec) {
  const std::vector<Word> words = SplitWhitespace(spec);
  std::string out;
  for (size_t w = 0; w < words.size(); ++w) {
    const Word& word = words[w];
    if (w > 0) out += ' ';
    if (w > 0 && word.text.starts_with("X")) {
      out += 'X';
      out += FormatNumber(ParseDouble({word.text.substr(1), word.position + 1}));
    } else if (w > 0 && word.text.starts_with("seed=")) {
      out += "seed=" + std::to_string(ParseInt<uint64_t>(
                           {word.text.substr(5), word.position + 5}));
    } else if (w > 0 && word.text.starts_with("ch=")) {
      out += "ch=";
      bool first = true;
      for (const Word& item : SplitOn(word.text.substr(3), word.position + 3,
                                      ',', /*skip_empty=*/false)) {
        if (!first) out += ',';
        out += std::to_string(ParseInt<int>(item));
        first = false;
      }
    } else {
      out += word.text;
    }
  }
  return out;
}

}  // namespace airtime
