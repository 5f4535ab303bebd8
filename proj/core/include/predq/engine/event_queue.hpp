#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "predq/error.hpp"

namespace predq::engine {

/// Simulated seconds.
using SimTime = double;

/// Pending events ordered by (time, insertion sequence). Equal-time events
/// fire in the order they were scheduled, and the clock never moves backward.
template <typename Payload>
class EventQueue {
 public:
  struct Event {
    SimTime time;
    std::uint64_t seq;
    Payload payload;
  };

  void schedule(SimTime time, Payload payload) {
    if (time < now_) {
      throw LogicError("event scheduled at t=" + std::to_string(time) +
                       " before current clock t=" + std::to_string(now_));
    }
    heap_.push(Event{time, next_seq_++, std::move(payload)});
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  SimTime now() const { return now_; }
  SimTime next_time() const { return heap_.top().time; }

  /// Removes the earliest event and advances the clock to its time.
  Event pop() {
    Event ev = heap_.top();
    heap_.pop();
    now_ = ev.time;
    return ev;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_ = 0.0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace predq::engine
