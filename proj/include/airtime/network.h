// Executable network built from a Topology: one Medium per wireless
// channel, wired links as lossless fixed-rate pipes, the media flow along
// the topology path, and cross-traffic flows on the first wireless hop's
// channel. Time advances one measurement window at a time.

#ifndef AIRTIME_NETWORK_H_
#define AIRTIME_NETWORK_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "airtime/sim_engine.h"
#include "airtime/stats_ledger.h"
#include "airtime/topology.h"
#include "airtime/traffic.h"
#include "airtime/transport.h"
#include "airtime/wlan_medium.h"

namespace airtime {

// Where an Xn cross flow runs. kDirect: between two extra stations, one
// hop. kViaAp: from an extra station through an access point to another
// extra station (two hops on the channel), as in an infrastructure BSS.
enum class CrossPlacement { kDirect, kViaAp };

struct NetworkConfig {
  // 1316 payload bytes + 80 header bytes = 1396 bytes per datagram.
  static constexpr int64_t kDefaultHeaderOverheadBytes = 80;

  Topology topology;
  MacTimingParams mac;
  LinkConditions wireless;  // every wireless link unless scheduled
  // Media-path link index -> piecewise conditions (overrides |wireless|
  // from each segment start).
  std::map<int, std::vector<LinkSegment>> schedules;
  int64_t wired_rate_bps = 100'000'000;
  FlowSpec media;
  ReliableParams reliable;
  TimeUs window_us = StatsLedger::kDefaultWindowUs;
  TimeUs cross_start_us = 0;
  CrossPlacement cross_placement = CrossPlacement::kViaAp;
  int64_t cross_payload_bytes = FlowSpec::kDefaultPayloadBytes;
  int64_t header_overhead_bytes = kDefaultHeaderOverheadBytes;
  size_t queue_limit = 256;
  double observation_loss = 0.0;
  uint64_t seed = 1;
  bool keep_timeline_log = false;

  void Validate() const;
};

struct NodeWindow {
  int node_id = 0;
  int channel = 0;
  WindowStats stats;
};

struct WindowSample {
  // The media source's agent: ledger of the first wireless hop's
  // transmitter, with sniffed qualities of every wireless path link.
  WindowStats observer;
  std::vector<NodeWindow> stations;  // every station, channel order
  int64_t sink_payload_bits = 0;     // unique media payload at the sink
  // MSDU bits the observer delivered, tallied from MAC completions.
  int64_t observer_delivered_bits = 0;
  bool source_backlogged = false;
  double media_rate_bps = 0.0;
};

class Network {
 public:
  explicit Network(NetworkConfig config);
  ~Network();
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  // Runs to the end of the next window and snapshots every ledger.
  WindowSample RunWindow();

  void SetMediaRate(double rate_bps);
  double media_rate_bps() const;

  Simulator& sim() { return sim_; }
  const NetworkConfig& config() const { return config_; }
  const std::vector<std::string>& node_names() const { return node_names_; }
  int observer_node() const { return observer_node_; }
  int observer_channel() const { return observer_channel_; }
  Medium& medium(int channel) { return *media_.at(channel); }

  int64_t sink_payload_bits_total() const;
  int64_t cross_payload_bits_total() const;
  uint64_t queue_drops() const { return queue_drops_; }
  uint64_t mac_drops() const { return mac_drops_; }
  uint64_t transport_retransmissions() const;
  // Airtime spent on reverse-direction (ACK) frames.
  TimeUs reverse_airtime_us() const { return reverse_airtime_us_; }

 private:
  struct LinkRecord;
  struct Flow;
  struct Packet {
    int flow = 0;
    bool is_ack = false;
    uint64_t seq = 0;
    int64_t payload_bytes = 0;
    int64_t msdu_bytes = 0;
    size_t hop = 0;
    std::vector<uint64_t> ack_seqs;
  };

  int AddNode(std::string name);
  int AddWirelessLink(int from, int to, Band band, int channel,
                      const std::vector<LinkSegment>& schedule, bool reverse);
  int AddWiredLink(int from, int to);
  Medium& EnsureStation(int channel, int node);
  void BuildFlows();

  void ScheduleEmission(Flow& flow);
  void OnEmit(int flow_id);
  void InjectData(Flow& flow, uint64_t seq, int64_t payload_bytes);
  void SendOnLink(uint64_t tag);
  void Advance(uint64_t tag);
  void Arrive(uint64_t tag);
  void TopUp(Flow& flow);
  void TrySend(Flow& flow);
  void ScheduleTimeout(Flow& flow);
  void SendAck(Flow& flow, std::vector<uint64_t> seqs);
  void OnMacComplete(int channel, int station, const MacFrame& frame,
                     const TxOutcome& outcome);

  NetworkConfig config_;
  Simulator sim_;
  std::vector<std::string> node_names_;
  std::vector<std::unique_ptr<LinkRecord>> links_;
  std::map<int, std::unique_ptr<Medium>> media_;
  std::vector<std::unique_ptr<Flow>> flows_;
  std::unordered_map<uint64_t, Packet> packets_;
  uint64_t next_tag_ = 1;

  int observer_node_ = 0;
  int observer_channel_ = 0;
  int observer_station_ = 0;
  std::vector<int> sniffed_links_;
  int64_t window_count_ = 0;
  int64_t observer_delivered_bits_ = 0;
  uint64_t queue_drops_ = 0;
  uint64_t mac_drops_ = 0;
  TimeUs reverse_airtime_us_ = 0;
};

// Capacity of the path: a saturating unreliable media flow (cross traffic
// as configured) for |duration_us|; delivered payload bits per second.
double MeasureCapacity(const NetworkConfig& config, TimeUs duration_us);

}  // namespace airtime

#endif  // AIRTIME_NETWORK_H_
