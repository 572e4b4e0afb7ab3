#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace iwprobe::flowmodel {

struct NetworkConfig {
  double bandwidth_mbps = 10.0;
  double rtt_ms = 100.0;
  std::uint32_t queue_limit = 16;  // packets, drop-tail FIFO
  std::uint32_t mss = 1460;
  std::uint32_t frame_overhead = 40;  // TCP + IP headers

  std::uint32_t wire_bytes() const { return mss + frame_overhead; }
  void validate() const;  // throws std::invalid_argument
};

struct FlowResult {
  double afct_ms = 0.0;
  std::uint32_t roundtrips = 0;
  std::uint32_t retransmissions = 0;
  std::uint32_t first_flight_drops = 0;
};

// Smallest r with iw * (2^r - 1) * mss >= flow: lossless slow-start doubling.
std::uint32_t slow_start_roundtrips(std::uint32_t iw_segments,
                                    std::uint64_t flow_bytes,
                                    std::uint32_t mss);

// Closed form: handshake RTT + one RTT per slow-start roundtrip + whatever
// part of the serialization time the roundtrips did not already cover:
//
//   afct = rtt + R*rtt + max(0, ser - R*rtt),  ser = wire_bits / bandwidth
//
// which is bounded below by both 2*rtt and the raw bandwidth bound
// flow*8/bandwidth.
double afct_analytic_ms(std::uint32_t iw_segments, std::uint64_t flow_bytes,
                        const NetworkConfig& net);

// Sojourn time of the last packet in a full queue (queue_limit frames
// serialized at the bottleneck rate).
double full_queue_delay_ms(const NetworkConfig& net);

// Flight-synchronous discrete-event model: slow-start bursts enter a
// drop-tail FIFO at ingress rate, the queue drains at the bottleneck rate,
// losses are detected at flight end and retransmitted in the next flight
// (retransmissions first, then new data). cwnd doubles on clean flights and
// halves on lossy ones. Deterministic; packets use one wire size.
FlowResult queue_sim(std::uint32_t iw_segments, std::uint64_t flow_bytes,
                     const NetworkConfig& net,
                     double ingress_rate_mbps = 1000.0);

struct GridSpec {
  std::vector<std::uint32_t> iws;
  std::vector<std::uint64_t> flows;
  std::vector<NetworkConfig> nets;
  double ingress_rate_mbps = 1000.0;
};

// Cross-product evaluation, one CSV row per (net, flow, iw), rows sorted by
// (bandwidth, rtt, queue_limit, flow, iw). Throws on empty inputs.
void sweep_grid(const GridSpec& grid, std::ostream& csv);

}  // namespace iwprobe::flowmodel
