#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iwprobe/probe/types.hpp"

namespace iwprobe::probe {

// Addressing needed to serialize one segment: the TCP checksum covers an
// IPv4 pseudo header. Addresses and ports in host byte order.
struct WireContext {
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
};

// Dotted quad -> host-order address. Throws std::invalid_argument.
std::uint32_t parse_ipv4(const std::string& dotted);

// TCP header (with MSS / window-scale options, NOP padded) + payload,
// checksummed and ready for a raw IPPROTO_TCP socket.
std::vector<std::uint8_t> encode_tcp(const TcpSegment& seg,
                                     const WireContext& ctx);

// Parses a TCP packet (header + payload, no IP header). Returns nullopt on
// short or malformed input. Fills ports into `ctx` when non-null.
std::optional<TcpSegment> decode_tcp(std::span<const std::uint8_t> bytes,
                                     WireContext* ctx = nullptr);

// RFC 1071 ones'-complement sum, exposed for tests.
std::uint16_t internet_checksum(std::span<const std::uint8_t> data,
                                std::uint32_t initial = 0);

}  // namespace iwprobe::probe
