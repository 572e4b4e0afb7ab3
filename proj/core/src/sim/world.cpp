#include "iwprobe/sim/world.hpp"

#include <limits>
#include <stdexcept>

namespace iwprobe::sim {

void World::schedule_at(TimeNs t, std::function<void()> fn) {
  if (t < now_) t = now_;  // never schedule into the past
  queue_.push(Event{t, next_order_++, std::move(fn)});
}

TimeNs World::next_event_time() const {
  if (queue_.empty()) return std::numeric_limits<TimeNs>::max();
  return queue_.top().t;
}

bool World::run_one() {
  if (queue_.empty()) return false;
  Event ev = queue_.top();
  queue_.pop();
  now_ = ev.t;
  ev.fn();
  return true;
}

void World::run_until(TimeNs t) {
  while (!queue_.empty() && queue_.top().t <= t) run_one();
  if (now_ < t) now_ = t;
}

void World::run_until_idle() {
  // Guard against runaway feedback loops in tests.
  for (std::uint64_t steps = 0; run_one(); ++steps)
    if (steps > 50'000'000) throw std::runtime_error("sim did not settle");
}

}  // namespace iwprobe::sim
