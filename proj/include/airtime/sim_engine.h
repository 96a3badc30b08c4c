// Discrete-event scheduler and seeded random streams.
//
// Time is an integer count of microseconds since the start of the run. The
// scheduler pops events in (time, sequence) order, so two events scheduled
// for the same instant fire in the order they were inserted.

#ifndef AIRTIME_SIM_ENGINE_H_
#define AIRTIME_SIM_ENGINE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace airtime {

using TimeUs = int64_t;

constexpr TimeUs kMicrosPerSecond = 1'000'000;
constexpr TimeUs kMicrosPerMilli = 1'000;

struct EventHandle {
  uint64_t sequence = 0;
  bool valid() const { return sequence != 0; }
};

class Simulator {
 public:
  using Callback = std::function<void()>;

  Simulator() = default;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Throws std::logic_error if |at_us| is in the past.
  EventHandle Schedule(TimeUs at_us, Callback callback,
                       std::string_view tag = {});
  EventHandle ScheduleIn(TimeUs delay_us, Callback callback,
                         std::string_view tag = {});

  // Returns false if the event already fired or was cancelled.
  bool Cancel(EventHandle handle);

  // Processes every event with time <= |end_us|, then parks the clock at
  // |end_us|. Throws std::logic_error if |end_us| is in the past.
  TimeUs RunUntil(TimeUs end_us);

  TimeUs Now() const { return now_us_; }
  size_t pending() const { return callbacks_.size(); }
  uint64_t processed() const { return processed_; }

  // When set, every fired event appends "<time> <seq> <tag>\n".
  void SetTrace(std::ostream* trace) { trace_ = trace; }

 private:
  struct Key {
    TimeUs time_us;
    uint64_t sequence;
    bool operator>(const Key& o) const {
      return time_us != o.time_us ? time_us > o.time_us
                                  : sequence > o.sequence;
    }
  };
  struct Pending {
    Callback callback;
    std::string tag;
  };

  TimeUs now_us_ = 0;
  uint64_t next_sequence_ = 1;
  uint64_t processed_ = 0;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> queue_;
  std::unordered_map<uint64_t, Pending> callbacks_;
  std::ostream* trace_ = nullptr;
};

// Counter-based generator: the n-th draw of a stream is
// SplitMix64Mix(key + n * 0x9E3779B97F4A7C15), where the key is derived from
// the run seed and the stream name. Each node/purpose gets its own named
// stream, so adding a stream never shifts the draws of another one. Only
// integer arithmetic is involved, so sequences are identical on every
// platform.
class RngStream {
 public:
  RngStream(uint64_t seed, std::string_view name);

  uint64_t NextU64();
  // Uniform on the closed range [lo, hi]; throws std::invalid_argument if
  // lo > hi. Unbiased (multiply-and-reject).
  int64_t UniformInt(int64_t lo, int64_t hi);
  // Uniform on [0, 1) with 53 random bits.
  double UniformUnit();
  bool Bernoulli(double probability);
  // Box-Muller; consumes two draws.
  double StandardNormal();

  uint64_t key() const { return key_; }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

uint64_t SplitMix64Mix(uint64_t z);

}  // namespace airtime

#endif  // AIRTIME_SIM_ENGINE_H_
