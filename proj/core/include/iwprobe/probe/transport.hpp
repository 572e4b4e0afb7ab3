#pragma once

#include <memory>
#include <optional>

#include "iwprobe/common.hpp"
#include "iwprobe/probe/types.hpp"

namespace iwprobe::probe {

struct Delivered {
  TcpSegment segment;
  TimeNs arrival_ns = 0;
};

// One probe's view of the network: a single 4-tuple it fully owns. The
// contract is the same for the in-process emulated backend and the raw-packet
// backend; all timestamps (including now()) come from the same clock so
// traces stay internally consistent.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual TimeNs now() = 0;

  // Send one segment on the bound 4-tuple, full header control.
  virtual void send(const TcpSegment& segment) = 0;

  // Block until a segment for this 4-tuple arrives or `deadline` passes.
  // Arrival timestamps are monotonic per connection.
  virtual std::optional<Delivered> receive(TimeNs deadline) = 0;

  virtual void sleep_until(TimeNs t) = 0;
};

// Consulted before every outbound packet. Shared across all concurrent
// probes of one vantage point; see pipeline::TokenBucket.
class SendPermitter {
 public:
  virtual ~SendPermitter() = default;
  // False means shutdown: the caller must stop probing.
  virtual bool acquire() = 0;
};

}  // namespace iwprobe::probe
