#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "iwprobe/common.hpp"

namespace iwprobe::sim {

// Single-threaded discrete-event scheduler with a virtual clock. One World
// per emulated probe/origin pair; concurrent probes each own their own World,
// so no locking is needed anywhere in the simulation.
class World {
 public:
  TimeNs now() const { return now_; }

  void schedule_at(TimeNs t, std::function<void()> fn);
  void schedule_after(TimeNs dt, std::function<void()> fn) {
    schedule_at(now_ + dt, std::move(fn));
  }

  bool has_pending() const { return !queue_.empty(); }
  TimeNs next_event_time() const;

  // Runs the earliest event. Returns false when the queue is empty.
  bool run_one();

  // Processes every event with time <= t, then sets the clock to t.
  void run_until(TimeNs t);

  void run_until_idle();

 private:
  struct Event {
    TimeNs t;
    std::uint64_t order;  // insertion tie-break keeps runs reproducible
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.order > b.order;
    }
  };

  TimeNs now_ = 0;
  std::uint64_t next_order_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace iwprobe::sim
