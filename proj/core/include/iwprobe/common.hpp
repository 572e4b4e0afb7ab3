#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace iwprobe {

// Monotonic time in nanoseconds. Where the value comes from (virtual clock or
// CLOCK_MONOTONIC) is a property of the transport, never of the analysis code.
using TimeNs = std::int64_t;

constexpr TimeNs kMicrosecond = 1'000;
constexpr TimeNs kMillisecond = 1'000'000;
constexpr TimeNs kSecond = 1'000'000'000;

constexpr TimeNs ms_to_ns(std::int64_t ms) { return ms * kMillisecond; }
constexpr double ns_to_ms(TimeNs ns) { return static_cast<double>(ns) / 1e6; }

struct Endpoint {
  std::string host;    // IPv4 dotted quad or sim host name
  std::uint16_t port = 0;

  bool operator==(const Endpoint&) const = default;
};

inline std::string to_string(const Endpoint& ep) {
  return ep.host + ":" + std::to_string(ep.port);
}

}  // namespace iwprobe
