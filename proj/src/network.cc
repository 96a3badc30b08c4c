#include "airtime/network.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace airtime {

struct Network::LinkRecord {
  int id = 0;
  LinkKind kind = LinkKind::kWireless;
  WirelessLink wireless;
  int from = 0;
  int to = 0;
  int64_t wired_rate_bps = 0;
  TimeUs busy_until_us = 0;
  bool reverse = false;
  std::unique_ptr<LinkMonitor> monitor;
};

struct Network::Flow {
  int id = 0;
  bool media = false;
  std::vector<int> route;
  std::vector<int> reverse_route;
  TrafficSource source;
  Transport transport = Transport::kUnreliable;
  TimeUs start_us = 0;
  std::unique_ptr<ReliableSender> sender;
  std::unique_ptr<ReliableReceiver> receiver;
  EventHandle emit_event;
  EventHandle timeout_event;
  EventHandle delayed_ack_event;
  int hop0_outstanding = 0;
  int64_t delivered_payload_bits = 0;
  int64_t window_payload_bits = 0;
  uint64_t next_unreliable_seq = 0;

  Flow(const FlowSpec& spec, uint64_t seed, const std::string& name,
       TimeUs start)
      : source(spec, seed, name, start), transport(spec.transport),
        start_us(start) {}
};

void NetworkConfig::Validate() const {
  mac.Validate();
  media.Validate();
  reliable.Validate();
  if (!IsOfdmRate(wireless.phy_rate_bps)) {
    throw std::invalid_argument("wireless phy rate must be an OFDM rate");
  }
  if (!(wireless.loss_prob >= 0.0 && wireless.loss_prob <= 1.0)) {
    throw std::invalid_argument("loss probability must be in [0, 1]");
  }
  for (const auto& [index, segments] : schedules) {
    if (index < 0 || index >= static_cast<int>(topology.links.size()) ||
        topology.links[index].kind != LinkKind::kWireless) {
      throw std::invalid_argument("schedule for a non-wireless link");
    }
    TimeUs previous = -1;
    for (const LinkSegment& segment : segments) {
      if (segment.start_us <= previous) {
        throw std::invalid_argument("schedule segments must be increasing");
      }
      if (!IsOfdmRate(segment.conditions.phy_rate_bps) ||
          !(segment.conditions.loss_prob >= 0.0 &&
            segment.conditions.loss_prob <= 1.0)) {
        throw std::invalid_argument("bad schedule segment");
      }
      previous = segment.start_us;
    }
  }
  if (wired_rate_bps <= 0 || window_us <= 0 || cross_start_us < 0 ||
      cross_payload_bytes <= 0 || header_overhead_bytes < 0 ||
      queue_limit < 2) {
    throw std::invalid_argument("bad network configuration");
  }
  if (!(observation_loss >= 0.0 && observation_loss < 1.0)) {
    throw std::invalid_argument("observation loss must be in [0, 1)");
  }
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.Validate();
  for (const std::string& name : config_.topology.node_names) AddNode(name);

  // Media path, in order.
  for (const TopologyLink& hop : config_.topology.links) {
    if (hop.kind == LinkKind::kWired) {
      AddWiredLink(hop.from_node, hop.to_node);
      continue;
    }
    auto it = config_.schedules.find(hop.index);
    static const std::vector<LinkSegment> kNoSchedule;
    AddWirelessLink(hop.from_node, hop.to_node, hop.band, hop.channel,
                    it == config_.schedules.end() ? kNoSchedule : it->second,
                    /*reverse=*/false);
  }

  const TopologyLink& first = config_.topology.FirstWireless();
  observer_node_ = first.from_node;
  observer_channel_ = first.channel;
  observer_station_ = *media_.at(observer_channel_)->StationOf(observer_node_);
  for (const TopologyLink& hop : config_.topology.links) {
    if (hop.kind != LinkKind::kWireless) continue;
    LinkRecord& record = *links_[hop.index];
    record.monitor = std::make_unique<LinkMonitor>(
        record.id, config_.observation_loss, config_.seed);
    sniffed_links_.push_back(record.id);
  }
  BuildFlows();
}

Network::~Network() = default;

int Network::AddNode(std::string name) {
  node_names_.push_back(std::move(name));
  return static_cast<int>(node_names_.size()) - 1;
}

Medium& Network::EnsureStation(int channel, int node) {
  auto it = media_.find(channel);
  if (it == media_.end()) {
    Medium::Options options;
    options.timing = config_.mac;
    options.window_us = config_.window_us;
    options.queue_limit = config_.queue_limit;
    options.keep_timeline_log = config_.keep_timeline_log;
    auto medium =
        std::make_unique<Medium>(sim_, channel, options, config_.seed);
    medium->SetCompletionHandler(
        [this, channel](int station, const MacFrame& frame,
                        const TxOutcome& outcome) {
          OnMacComplete(channel, station, frame, outcome);
        });
    it = media_.emplace(channel, std::move(medium)).first;
  }
  if (!it->second->StationOf(node)) it->second->AddStation(node);
  return *it->second;
}

int Network::AddWirelessLink(int from, int to, Band band, int channel,
                             const std::vector<LinkSegment>& schedule,
                             bool reverse) {
  auto record = std::make_unique<LinkRecord>();
  record->id = static_cast<int>(links_.size());
  record->kind = LinkKind::kWireless;
  record->from = from;
  record->to = to;
  record->reverse = reverse;
  record->wireless.link_id = record->id;
  record->wireless.band = band;
  record->wireless.channel = channel;
  record->wireless.tx_node = from;
  record->wireless.rx_node = to;
  record->wireless.base = config_.wireless;
  record->wireless.schedule = schedule;
  Medium& medium = EnsureStation(channel, from);
  EnsureStation(channel, to);
  medium.AddLink(&record->wireless);
  links_.push_back(std::move(record));
  return links_.back()->id;
}

int Network::AddWiredLink(int from, int to) {
  auto record = std::make_unique<LinkRecord>();
  record->id = static_cast<int>(links_.size());
  record->kind = LinkKind::kWired;
  record->from = from;
  record->to = to;
  record->wired_rate_bps = config_.wired_rate_bps;
  links_.push_back(std::move(record));
  return links_.back()->id;
}

void Network::BuildFlows() {
  const Topology& topology = config_.topology;

  auto media = std::make_unique<Flow>(config_.media, config_.seed,
                                      "traffic/media", 0);
  media->id = 0;
  media->media = true;
  for (const TopologyLink& hop : topology.links) media->route.push_back(hop.index);
  if (media->transport == Transport::kReliableSimplified) {
    for (auto it = topology.links.rbegin(); it != topology.links.rend(); ++it) {
      const LinkRecord& forward = *links_[it->index];
      media->reverse_route.push_back(
          forward.kind == LinkKind::kWired
              ? AddWiredLink(forward.to, forward.from)
              : AddWirelessLink(forward.to, forward.from, forward.wireless.band,
                                forward.wireless.channel,
                                forward.wireless.schedule, /*reverse=*/true));
    }
    media->sender = std::make_unique<ReliableSender>(config_.reliable);
    media->receiver = std::make_unique<ReliableReceiver>(config_.reliable);
  }
  flows_.push_back(std::move(media));

  const TopologyLink& first = topology.FirstWireless();
  int relay = -1;
  for (size_t k = 0; k < topology.cross_flows.size(); ++k) {
    const std::string prefix = "x" + std::to_string(k + 1);
    const int src = AddNode(prefix + "s");
    const int dst = AddNode(prefix + "d");
    FlowSpec spec;
    spec.profile = ProfileKind::kCbr;
    spec.rate_bps = topology.cross_flows[k].rate_bps;
    spec.datagram_payload_bytes = config_.cross_payload_bytes;
    spec.duration_s = config_.media.duration_s;
    auto flow = std::make_unique<Flow>(spec, config_.seed, "traffic/" + prefix,
                                       config_.cross_start_us);
    flow->id = static_cast<int>(flows_.size());
    static const std::vector<LinkSegment> kNoSchedule;
    if (config_.cross_placement == CrossPlacement::kDirect) {
      flow->route.push_back(AddWirelessLink(src, dst, first.band, first.channel,
                                            kNoSchedule, false));
    } else {
      if (relay < 0) relay = AddNode("xap");
      flow->route.push_back(AddWirelessLink(src, relay, first.band,
                                            first.channel, kNoSchedule, false));
      flow->route.push_back(AddWirelessLink(relay, dst, first.band,
                                            first.channel, kNoSchedule, false));
    }
    flows_.push_back(std::move(flow));
  }

  for (auto& flow : flows_) {
    if (flow->source.saturating()) {
      if (flow->transport == Transport::kReliableSimplified) {
        TrySend(*flow);
      } else {
        TopUp(*flow);
      }
    } else {
      ScheduleEmission(*flow);
    }
  }
}

void Network::ScheduleEmission(Flow& flow) {
  const Datagram next = flow.source.Peek(sim_.Now());
  const int id = flow.id;
  flow.emit_event = sim_.Schedule(std::max(next.emit_us, sim_.Now()),
                                  [this, id] { OnEmit(id); }, "emit");
}

void Network::OnEmit(int flow_id) {
  Flow& flow = *flows_[flow_id];
  flow.emit_event = {};
  const Datagram d = flow.source.Peek(sim_.Now());
  flow.source.Pop(sim_.Now());
  if (flow.transport == Transport::kReliableSimplified) {
    flow.sender->Offer(d.payload_bytes);
    TrySend(flow);
  } else {
    InjectData(flow, flow.next_unreliable_seq++, d.payload_bytes);
  }
  ScheduleEmission(flow);
}

void Network::InjectData(Flow& flow, uint64_t seq, int64_t payload_bytes) {
  const uint64_t tag = next_tag_++;
  Packet packet;
  packet.flow = flow.id;
  packet.seq = seq;
  packet.payload_bytes = payload_bytes;
  packet.msdu_bytes = payload_bytes + config_.header_overhead_bytes;
  packets_.emplace(tag, std::move(packet));
  SendOnLink(tag);
}

void Network::SendOnLink(uint64_t tag) {
  Packet& packet = packets_.at(tag);
  Flow& flow = *flows_[packet.flow];
  const std::vector<int>& route =
      packet.is_ack ? flow.reverse_route : flow.route;
  LinkRecord& link = *links_[route[packet.hop]];
  const bool first_hop = packet.hop == 0 && !packet.is_ack;
  if (first_hop) ++flow.hop0_outstanding;

  if (link.kind == LinkKind::kWireless) {
    const bool queued = media_.at(link.wireless.channel)
                            ->Enqueue({link.id, packet.msdu_bytes, tag});
    if (!queued) {
      ++queue_drops_;
      if (first_hop) --flow.hop0_outstanding;
      packets_.erase(tag);
    }
    return;
  }
  const auto serialization = static_cast<TimeUs>(std::ceil(
      static_cast<double>(packet.msdu_bytes) * 8e6 /
      static_cast<double>(link.wired_rate_bps)));
  link.busy_until_us = std::max(link.busy_until_us, sim_.Now()) + serialization;
  const int flow_id = flow.id;
  sim_.Schedule(
      link.busy_until_us,
      [this, tag, first_hop, flow_id] {
        Flow& f = *flows_[flow_id];
        if (first_hop) --f.hop0_outstanding;
        Advance(tag);
        if (first_hop && f.source.saturating()) {
          f.transport == Transport::kReliableSimplified ? TrySend(f) : TopUp(f);
        }
      },
      "wired");
}

void Network::Advance(uint64_t tag) {
  Packet& packet = packets_.at(tag);
  const Flow& flow = *flows_[packet.flow];
  const size_t hops =
      packet.is_ack ? flow.reverse_route.size() : flow.route.size();
  ++packet.hop;
  if (packet.hop == hops) {
    Arrive(tag);
  } else {
    SendOnLink(tag);
  }
}

void Network::Arrive(uint64_t tag) {
  Packet packet = std::move(packets_.at(tag));
  packets_.erase(tag);
  Flow& flow = *flows_[packet.flow];
  const TimeUs now = sim_.Now();
  if (packet.is_ack) {
    flow.sender->OnAck(packet.ack_seqs, now);
    TrySend(flow);
    return;
  }
  if (flow.transport == Transport::kUnreliable) {
    flow.delivered_payload_bits += packet.payload_bytes * 8;
    flow.window_payload_bits += packet.payload_bytes * 8;
    return;
  }
  if (flow.receiver->OnData(packet.seq, now)) {
    flow.delivered_payload_bits += packet.payload_bytes * 8;
    flow.window_payload_bits += packet.payload_bytes * 8;
  }
  if (auto ack = flow.receiver->TakeAckIfDue()) {
    if (flow.delayed_ack_event.valid()) sim_.Cancel(flow.delayed_ack_event);
    flow.delayed_ack_event = {};
    SendAck(flow, std::move(*ack));
  } else if (!flow.delayed_ack_event.valid()) {
    const int id = flow.id;
    flow.delayed_ack_event = sim_.ScheduleIn(
        config_.reliable.delayed_ack_us,
        [this, id] {
          Flow& f = *flows_[id];
          f.delayed_ack_event = {};
          if (auto pending = f.receiver->TakePendingAck()) {
            SendAck(f, std::move(*pending));
          }
        },
        "delayed_ack");
  }
}

void Network::SendAck(Flow& flow, std::vector<uint64_t> seqs) {
  const uint64_t tag = next_tag_++;
  Packet packet;
  packet.flow = flow.id;
  packet.is_ack = true;
  packet.payload_bytes = config_.reliable.ack_payload_bytes;
  packet.msdu_bytes = packet.payload_bytes + config_.header_overhead_bytes;
  packet.ack_seqs = std::move(seqs);
  packets_.emplace(tag, std::move(packet));
  SendOnLink(tag);
}

void Network::TopUp(Flow& flow) {
  if (sim_.Now() < flow.start_us) return;
  // Two frames keep the first hop backlogged across every completion.
  while (flow.hop0_outstanding < 2) {
    const Datagram d = flow.source.Peek(sim_.Now());
    flow.source.Pop(sim_.Now());
    const int before = flow.hop0_outstanding;
    InjectData(flow, flow.next_unreliable_seq++, d.payload_bytes);
    if (flow.hop0_outstanding == before) break;  // queue refused it
  }
}

void Network::TrySend(Flow& flow) {
  const bool unlimited = flow.source.saturating();
  while (auto segment = flow.sender->NextToSend(
             sim_.Now(), unlimited, config_.media.datagram_payload_bytes)) {
    InjectData(flow, segment->seq, segment->payload_bytes);
  }
  ScheduleTimeout(flow);
}

void Network::ScheduleTimeout(Flow& flow) {
  if (flow.timeout_event.valid()) sim_.Cancel(flow.timeout_event);
  flow.timeout_event = {};
  const std::optional<TimeUs> deadline = flow.sender->NextDeadline();
  if (!deadline) return;
  const int id = flow.id;
  flow.timeout_event = sim_.Schedule(
      std::max(*deadline, sim_.Now() + 1),
      [this, id] {
        Flow& f = *flows_[id];
        f.timeout_event = {};
        f.sender->ExpireTimeouts(sim_.Now());
        TrySend(f);
      },
      "rto");
}

void Network::OnMacComplete(int channel, int station, const MacFrame& frame,
                            const TxOutcome& outcome) {
  LinkRecord& link = *links_[frame.link_id];
  if (link.monitor) {
    link.monitor->OnCompletion(outcome.attempts, outcome.airtime_us,
                               outcome.phy_rate_bps);
  }
  if (link.reverse) reverse_airtime_us_ += outcome.airtime_us;
  if (channel == observer_channel_ && station == observer_station_ &&
      outcome.delivered) {
    observer_delivered_bits_ += frame.msdu_bytes * 8;
  }
  Packet& packet = packets_.at(frame.tag);
  Flow& flow = *flows_[packet.flow];
  const bool first_hop = packet.hop == 0 && !packet.is_ack;
  if (first_hop) --flow.hop0_outstanding;
  if (outcome.delivered) {
    Advance(frame.tag);
  } else {
    ++mac_drops_;
    packets_.erase(frame.tag);
  }
  if (first_hop && flow.source.saturating()) {
    if (flow.transport == Transport::kReliableSimplified) {
      TrySend(flow);
    } else {
      TopUp(flow);
    }
  }
}

WindowSample Network::RunWindow() {
  const TimeUs boundary = (window_count_ + 1) * config_.window_us;
  // Cross flows that start later get their first emission scheduled by the
  // source itself; saturating ones need a nudge once they are live.
  for (auto& flow : flows_) {
    if (flow->source.saturating() && flow->start_us > sim_.Now() &&
        flow->start_us <= boundary) {
      const int id = flow->id;
      sim_.Schedule(flow->start_us, [this, id] { TopUp(*flows_[id]); },
                    "start");
    }
  }
  sim_.RunUntil(boundary);

  WindowSample sample;
  for (auto& [channel, medium] : media_) {
    for (size_t s = 0; s < medium->station_count(); ++s) {
      const int station = static_cast<int>(s);
      NodeWindow node;
      node.channel = channel;
      node.node_id = medium->timeline(station).node_id();
      const bool observer =
          channel == observer_channel_ && station == observer_station_;
      if (observer) {
        sample.source_backlogged = medium->queue_frames(station) > 0;
      }
      node.stats = medium->SnapshotWindow(station);
      if (observer) sample.observer = node.stats;
      sample.stations.push_back(std::move(node));
    }
  }
  for (int id : sniffed_links_) {
    sample.observer.links.push_back(links_[id]->monitor->SnapshotAndReset());
  }
  Flow& media = *flows_.front();
  sample.sink_payload_bits = media.window_payload_bits;
  sample.observer_delivered_bits = observer_delivered_bits_;
  sample.media_rate_bps = media.source.rate_bps();
  for (auto& flow : flows_) flow->window_payload_bits = 0;
  observer_delivered_bits_ = 0;
  ++window_count_;
  return sample;
}

void Network::SetMediaRate(double rate_bps) {
  Flow& media = *flows_.front();
  media.source.SetRate(rate_bps, sim_.Now());
  if (media.emit_event.valid()) {
    sim_.Cancel(media.emit_event);
    ScheduleEmission(media);
  }
}

double Network::media_rate_bps() const {
  return flows_.front()->source.rate_bps();
}

int64_t Network::sink_payload_bits_total() const {
  return flows_.front()->delivered_payload_bits;
}

int64_t Network::cross_payload_bits_total() const {
  int64_t total = 0;
  for (size_t i = 1; i < flows_.size(); ++i) {
    total += flows_[i]->delivered_payload_bits;
  }
  return total;
}

uint64_t Network::transport_retransmissions() const {
  const Flow& media = *flows_.front();
  return media.sender ? media.sender->retransmissions() : 0;
}

double MeasureCapacity(const NetworkConfig& config, TimeUs duration_us) {
  NetworkConfig probe = config;
  probe.media.profile = ProfileKind::kSaturating;
  probe.media.transport = Transport::kUnreliable;
  const int64_t windows =
      std::max<int64_t>(1, duration_us / probe.window_us);
  Network network(std::move(probe));
  for (int64_t w = 0; w < windows; ++w) network.RunWindow();
  return static_cast<double>(network.sink_payload_bits_total()) * 1e6 /
         static_cast<double>(windows * config.window_us);
}

}  // namespace airtime
