#pragma once

// Shared test rig: one virtual-clock world with a mock origin listening on
// origin.test:80 and a client transport bound to a fresh 4-tuple.

#include <memory>

#include "iwprobe/origin/mock_origin.hpp"
#include "iwprobe/probe/engine.hpp"
#include "iwprobe/sim/net.hpp"

namespace iwprobe::test {

struct SimRig {
  sim::World world;
  sim::Net net{world};
  Endpoint server{"origin.test", 80};
  std::unique_ptr<origin::MockOrigin> origin;
  std::uint16_t next_port = 40'000;

  explicit SimRig(origin::OriginConfig config, std::uint64_t seed = 1) {
    origin = std::make_unique<origin::MockOrigin>(net, server, config, seed);
  }

  std::unique_ptr<probe::Transport> connect() {
    return net.connect(sim::Flow{Endpoint{"client", next_port++}, server});
  }

  probe::ProbeSpec spec(std::uint16_t mss = 1200) const {
    probe::ProbeSpec s;
    s.target = server;
    s.host_name = "origin.test";
    s.resource_path = "/object";
    s.announced_mss = mss;
    return s;
  }
};

inline std::size_t count_outbound(const probe::ProbeTrace& trace,
                                  probe::TcpFlags flag) {
  std::size_t n = 0;
  for (const auto& ev : trace.events)
    if (ev.dir == probe::Direction::kOutbound && (ev.flags & flag)) ++n;
  return n;
}

}  // namespace iwprobe::test
