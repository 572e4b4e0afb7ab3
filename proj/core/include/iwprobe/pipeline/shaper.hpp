#pragma once

#include <condition_variable>
#include <mutex>

#include "iwprobe/common.hpp"
#include "iwprobe/probe/transport.hpp"

namespace iwprobe::pipeline {

// Token bucket consulted before every outbound packet. One instance is
// shared by all concurrent probes of a vantage point, so the long-run
// emission rate stays at or below pps across all of them; the bucket depth
// bounds the burst.
class TokenBucket final : public probe::SendPermitter {
 public:
  // depth <= 0 selects the default depth of one second's worth (== pps).
  explicit TokenBucket(double pps, double depth = 0.0);

  // Pure reservation core, also used directly by tests: consumes one token
  // and returns the earliest time the packet may leave. Calls must pass
  // non-decreasing `now` values.
  TimeNs reserve_at(TimeNs now);

  // Blocking real-time permit. Returns false once shut down.
  bool acquire() override;

  // Wakes all waiters; subsequent and pending acquires fail.
  void shutdown();

  double pps() const { return pps_; }
  double depth() const { return depth_; }

 private:
  void refill_locked(TimeNs now);

  const double pps_;
  const double depth_;
  std::mutex mutex_;
  std::condition_variable cv_;
  double tokens_;
  TimeNs last_refill_ = 0;
  bool primed_ = false;
  bool shutdown_ = false;
};

}  // namespace iwprobe::pipeline
