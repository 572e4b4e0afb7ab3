#pragma once

#include <memory>

#include "iwprobe/probe/transport.hpp"

namespace iwprobe::probe {

// Live backend on a Linux raw IPPROTO_TCP socket. Needs CAP_NET_RAW, and the
// host stack must be kept from answering on the probed 4-tuple, e.g.
//
//   iptables -A OUTPUT -p tcp --tcp-flags RST RST --sport <port> -j DROP
//
// or the kernel's RSTs will tear the probed connection down mid-flight.
// Arrival timestamps are CLOCK_MONOTONIC at receive; hardware timestamping
// is strictly better for pacing analysis but NIC-specific.
//
// Throws std::system_error when the socket cannot be opened (no privilege)
// and std::runtime_error on non-Linux builds.
std::unique_ptr<Transport> make_raw_transport(const Endpoint& local,
                                              const Endpoint& remote);

bool raw_transport_supported();

}  // namespace iwprobe::probe
