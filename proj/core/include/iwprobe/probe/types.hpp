#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iwprobe/common.hpp"

namespace iwprobe::probe {

enum TcpFlag : std::uint8_t {
  kSyn = 0x01,
  kAck = 0x02,
  kFin = 0x04,
  kRst = 0x08,
  kPsh = 0x10,
};
using TcpFlags = std::uint8_t;

std::string flags_to_string(TcpFlags flags);
TcpFlags flags_from_string(const std::string& s);

// One TCP segment with full header control. The emulated backend moves these
// structs around directly; the raw backend serializes them to the wire.
struct TcpSegment {
  std::uint32_t seq = 0;
  std::uint32_t ack = 0;
  TcpFlags flags = 0;
  std::uint16_t window = 0;
  std::optional<std::uint16_t> mss_option;
  std::optional<std::uint8_t> window_scale_option;
  std::string payload;

  bool has(TcpFlags f) const { return (flags & f) != 0; }
  std::size_t payload_len() const { return payload.size(); }
};

enum class Direction : std::uint8_t { kInbound, kOutbound };

// One observed segment, reduced to what the analyses need. seq_offset is the
// payload start relative to (server ISN + 1); outbound events use the client
// sequence space the same way.
struct SegmentEvent {
  Direction dir = Direction::kInbound;
  std::uint64_t seq_offset = 0;
  std::uint32_t payload_len = 0;
  TcpFlags flags = 0;
  TimeNs ts = 0;
  std::uint32_t window = 0;  // raw window field as sent/received

  bool is_payload() const { return payload_len > 0; }
};

struct ProbeSpec {
  Endpoint target;
  std::string host_name;
  std::string resource_path = "/";
  std::uint16_t announced_mss = 1200;       // sweep set default member
  std::uint16_t announced_window = 65535;
  std::uint8_t window_scale = 4;
  std::int64_t handshake_ack_delay_ms = 0;  // ~50 for pacing runs
  std::int64_t retransmission_wait_ms = 10'000;
  std::int64_t probe_timeout_ms = 30'000;
  std::uint64_t rng_seed = 0;               // ISN + ephemeral port choice

  // Throws std::invalid_argument when a field is out of contract.
  void validate() const;
};

constexpr std::uint16_t kMssSweepDefault[] = {64, 128, 536, 1200};

enum class ProbeOutcome : std::uint8_t {
  kCompleted,
  kHandshakeFailed,
  kNoData,
  kNoRetransmission,
  kAborted,
};

std::string to_string(ProbeOutcome o);

struct ProbeTrace {
  ProbeSpec spec;
  std::vector<SegmentEvent> events;
  std::optional<std::uint16_t> server_mss;
  TimeNs handshake_rtt_ns = 0;
  ProbeOutcome outcome = ProbeOutcome::kAborted;
  // Result of the continuation check; set only when a retransmission was
  // seen and the verification ACK went out.
  std::optional<bool> verified_full;

  std::vector<SegmentEvent> inbound_payload() const;
};

}  // namespace iwprobe::probe
