#include "airtime/sim_engine.h"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace airtime {

EventHandle Simulator::Schedule(TimeUs at_us, Callback callback,
                                std::string_view tag) {
  if (at_us < now_us_) {
    throw std::logic_error("event scheduled at " + std::to_string(at_us) +
                           " us, clock already at " + std::to_string(now_us_));
  }
  const uint64_t sequence = next_sequence_++;
  queue_.push({at_us, sequence});
  callbacks_.emplace(sequence, Pending{std::move(callback), std::string(tag)});
  return EventHandle{sequence};
}

EventHandle Simulator::ScheduleIn(TimeUs delay_us, Callback callback,
                                  std::string_view tag) {
  return Schedule(now_us_ + delay_us, std::move(callback), tag);
}

bool Simulator::Cancel(EventHandle handle) {
  return callbacks_.erase(handle.sequence) > 0;
}

TimeUs Simulator::RunUntil(TimeUs end_us) {
  if (end_us < now_us_) {
    throw std::logic_error("RunUntil target precedes the clock");
  }
  while (!queue_.empty() && queue_.top().time_us <= end_us) {
    const Key key = queue_.top();
    queue_.pop();
    auto it = callbacks_.find(key.sequence);
    if (it == callbacks_.end()) continue;  // cancelled
    Pending pending = std::move(it->second);
    callbacks_.erase(it);
    now_us_ = key.time_us;
    ++processed_;
    if (trace_ != nullptr) {
      *trace_ << key.time_us << ' ' << key.sequence << ' ' << pending.tag
              << '\n';
    }
    pending.callback();
  }
  now_us_ = end_us;
  return now_us_;
}

uint64_t SplitMix64Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

uint64_t Fnv1a(std::string_view text) {
  uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace

RngStream::RngStream(uint64_t seed, std::string_view name)
    : key_(SplitMix64Mix(SplitMix64Mix(seed + kGamma) ^ Fnv1a(name))) {}

uint64_t RngStream::NextU64() {
  ++counter_;
  return SplitMix64Mix(key_ + counter_ * kGamma);
}

int64_t RngStream::UniformInt(int64_t lo, int64_t hi) {
  if (lo > hi) {
    throw std::invalid_argument("UniformInt: lo > hi");
  }
  const uint64_t range =
      static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  if (range == 0) return static_cast<int64_t>(NextU64());  // full 64-bit span
  unsigned __int128 product =
      static_cast<unsigned __int128>(NextU64()) * range;
  uint64_t low = static_cast<uint64_t>(product);
  if (low < range) {
    const uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(NextU64()) * range;
      low = static_cast<uint64_t>(product);
    }
  }
  return static_cast<int64_t>(static_cast<uint64_t>(lo) +
                              static_cast<uint64_t>(product >> 64));
}

double RngStream::UniformUnit() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

bool RngStream::Bernoulli(double probability) {
  if (probability <= 0.0) return false;
  if (probability >= 1.0) return true;
  return UniformUnit() < probability;
}

double RngStream::StandardNormal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - UniformUnit();
  const double u2 = UniformUnit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace airtime
