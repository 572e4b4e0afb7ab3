#pragma once

#include <optional>

#include "iwprobe/probe/transport.hpp"
#include "iwprobe/probe/types.hpp"

namespace iwprobe::probe {

struct ConnectionState {
  std::uint32_t client_isn = 0;
  std::uint32_t server_isn = 0;
  std::uint32_t snd_nxt = 0;  // next client sequence number
  std::optional<std::uint16_t> server_mss;
  TimeNs handshake_rtt_ns = 0;
  bool open = false;
};

// SYN with MSS, window and window-scale options only; the final ACK leaves
// after spec.handshake_ack_delay_ms. Events (including strays) are appended
// to `trace`. Returns nullopt on timeout or RST.
std::optional<ConnectionState> open_handshake(const ProbeSpec& spec,
                                              Transport& transport,
                                              ProbeTrace& trace,
                                              SendPermitter* permit = nullptr);

// The full four-phase probe: handshake, GET + silent collection until the
// overlap rule flags a retransmission, continuation check, RST teardown.
ProbeTrace probe_once(const ProbeSpec& spec, Transport& transport,
                      SendPermitter* permit = nullptr);

// Acknowledges everything received (ACK at the top of the observed sequence
// space) with an advertised window of 2 * MSS, then reports whether the
// server continued with data beyond that point. `span_end` is the byte
// offset just past the highest payload seen.
bool verify_iw_full(ConnectionState& conn, const ProbeSpec& spec,
                    Transport& transport, ProbeTrace& trace,
                    std::uint64_t span_end, TimeNs deadline,
                    SendPermitter* permit = nullptr);

// RST teardown; idempotent, emits nothing when the connection never opened.
void abort_connection(ConnectionState& conn, Transport& transport,
                      ProbeTrace& trace, SendPermitter* permit = nullptr);

// Serializes the fixed request template for `spec`.
std::string http_request(const ProbeSpec& spec);

}  // namespace iwprobe::probe
