#include "airtime/transport.h"

#include <gtest/gtest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "airtime/sim_engine.h"

namespace airtime {
namespace {

ReliableParams Small() {
  ReliableParams params;
  params.window = 4;
  params.ack_every = 2;
  return params;
}

TEST(ReliableSenderTest, WindowLimitsInFlight) {
  ReliableSender sender(Small());
  for (int i = 0; i < 10; ++i) sender.Offer(1316);
  std::vector<uint64_t> sent;
  while (auto segment = sender.NextToSend(0, false, 0)) {
    sent.push_back(segment->seq);
  }
  EXPECT_EQ(sent, (std::vector<uint64_t>{0, 1, 2, 3}));
  EXPECT_EQ(sender.in_flight(), 4);
  EXPECT_EQ(sender.buffered(), 6u);
  const std::vector<uint64_t> ack = {1, 2};
  sender.OnAck(ack, 1000);
  EXPECT_EQ(sender.in_flight(), 2);
  EXPECT_EQ(sender.NextToSend(1000, false, 0)->seq, 4u);
}

TEST(ReliableSenderTest, UnlimitedDataNeverRunsDry) {
  ReliableSender sender(Small());
  auto segment = sender.NextToSend(0, true, 500);
  ASSERT_TRUE(segment.has_value());
  EXPECT_EQ(segment->payload_bytes, 500);
  EXPECT_FALSE(ReliableSender(Small()).NextToSend(0, false, 500).has_value());
}

TEST(ReliableSenderTest, TimeoutRetransmitsFirst) {
  ReliableSender sender(Small());
  sender.Offer(100);
  sender.Offer(200);
  sender.NextToSend(0, false, 0);
  EXPECT_EQ(sender.rto_us(), Small().initial_rto_us);
  EXPECT_EQ(sender.NextDeadline(), Small().initial_rto_us);
  EXPECT_EQ(sender.ExpireTimeouts(Small().initial_rto_us - 1), 0);
  EXPECT_EQ(sender.ExpireTimeouts(Small().initial_rto_us), 1);
  const auto resend = sender.NextToSend(Small().initial_rto_us, false, 0);
  ASSERT_TRUE(resend.has_value());
  EXPECT_TRUE(resend->retransmission);
  EXPECT_EQ(resend->seq, 0u);
  EXPECT_EQ(resend->payload_bytes, 100);
  EXPECT_EQ(sender.retransmissions(), 1u);
}

TEST(ReliableSenderTest, RtoFollowsSmoothedDelay) {
  ReliableSender sender(Small());
  sender.Offer(100);
  sender.NextToSend(0, false, 0);
  const std::vector<uint64_t> ack = {0};
  sender.OnAck(ack, 8'000);
  EXPECT_DOUBLE_EQ(*sender.smoothed_delay_us(), 8'000.0);
  EXPECT_EQ(sender.rto_us(), 32'000);
  // Duplicate ACKs are ignored.
  sender.OnAck(ack, 9'000);
  EXPECT_DOUBLE_EQ(*sender.smoothed_delay_us(), 8'000.0);
  EXPECT_FALSE(sender.NextDeadline().has_value());
}

TEST(ReliableReceiverTest, AcksEveryKAndFlushes) {
  ReliableReceiver receiver(Small());
  EXPECT_TRUE(receiver.OnData(0, 10));
  EXPECT_FALSE(receiver.TakeAckIfDue().has_value());
  EXPECT_EQ(receiver.pending_since(), 10);
  EXPECT_TRUE(receiver.OnData(1, 20));
  EXPECT_EQ(*receiver.TakeAckIfDue(), (std::vector<uint64_t>{0, 1}));
  EXPECT_FALSE(receiver.pending_since().has_value());
  EXPECT_FALSE(receiver.OnData(1, 30));  // duplicate, still acknowledged
  EXPECT_EQ(*receiver.TakePendingAck(), (std::vector<uint64_t>{1}));
  EXPECT_EQ(receiver.unique_received(), 2u);
}

TEST(ReliableParamsTest, Validation) {
  ReliableParams params;
  params.window = 0;
  EXPECT_THROW(ReliableSender{params}, std::invalid_argument);
  params = {};
  params.ack_every = 0;
  EXPECT_THROW(ReliableReceiver{params}, std::invalid_argument);
}

// A lossy channel between sender and receiver: every segment eventually
// arrives exactly once at the application despite drops in both directions.
TEST(ReliableTransportTest, RecoversEveryLossOnALossyChannel) {
  const ReliableParams params = Small();
  ReliableSender sender(params);
  ReliableReceiver receiver(params);
  RngStream rng(8, "lossy");
  constexpr int kDatagrams = 500;
  for (int i = 0; i < kDatagrams; ++i) sender.Offer(1316);
  TimeUs now = 0;
  std::set<uint64_t> received;
  for (int step = 0; step < 200'000 && receiver.unique_received() < kDatagrams;
       ++step) {
    now += 1'000;
    sender.ExpireTimeouts(now);
    while (auto segment = sender.NextToSend(now, false, 0)) {
      if (rng.Bernoulli(0.2)) continue;  // data lost
      receiver.OnData(segment->seq, now);
      received.insert(segment->seq);
    }
    auto ack = receiver.TakeAckIfDue();
    if (!ack) ack = receiver.TakePendingAck();
    if (ack && !rng.Bernoulli(0.2)) sender.OnAck(*ack, now + 500);
  }
  EXPECT_EQ(receiver.unique_received(), static_cast<uint64_t>(kDatagrams));
  EXPECT_EQ(received.size(), static_cast<size_t>(kDatagrams));
  EXPECT_GT(sender.retransmissions(), 0u);
}

}  // namespace
}  // namespace airtime
