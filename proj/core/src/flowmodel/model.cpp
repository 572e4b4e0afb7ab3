#include "iwprobe/flowmodel/model.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <ostream>
#include <stdexcept>

namespace iwprobe::flowmodel {

void NetworkConfig::validate() const {
  if (bandwidth_mbps <= 0 || rtt_ms <= 0)
    throw std::invalid_argument("bandwidth and rtt must be positive");
  if (queue_limit < 1) throw std::invalid_argument("queue_limit must be >= 1");
  if (mss < 1) throw std::invalid_argument("mss must be >= 1");
}

std::uint32_t slow_start_roundtrips(std::uint32_t iw_segments,
                                    std::uint64_t flow_bytes,
                                    std::uint32_t mss) {
  if (iw_segments < 1 || flow_bytes < 1 || mss < 1)
    throw std::invalid_argument("iw, flow and mss must be >= 1");
  std::uint64_t delivered = 0;
  std::uint64_t window = iw_segments;
  for (std::uint32_t r = 1; r <= 64; ++r) {
    delivered += window * mss;
    if (delivered >= flow_bytes) return r;
    window *= 2;
  }
  return 64;  // unreachable for sane inputs
}

double afct_analytic_ms(std::uint32_t iw_segments, std::uint64_t flow_bytes,
                        const NetworkConfig& net) {
  net.validate();
  const std::uint32_t r = slow_start_roundtrips(iw_segments, flow_bytes, net.mss);
  const std::uint64_t nsegs = (flow_bytes + net.mss - 1) / net.mss;
  const double wire_bits =
      static_cast<double>(flow_bytes + nsegs * net.frame_overhead) * 8.0;
  const double serialization_ms = wire_bits / (net.bandwidth_mbps * 1e6) * 1e3;
  const double data_ms = r * net.rtt_ms;
  return net.rtt_ms + data_ms + std::max(0.0, serialization_ms - data_ms);
}

double full_queue_delay_ms(const NetworkConfig& net) {
  net.validate();
  const double bits = static_cast<double>(net.queue_limit) * net.wire_bytes() * 8.0;
  return bits / (net.bandwidth_mbps * 1e6) * 1e3;
}

FlowResult queue_sim(std::uint32_t iw_segments, std::uint64_t flow_bytes,
                     const NetworkConfig& net, double ingress_rate_mbps) {
  net.validate();
  if (iw_segments < 1 || flow_bytes < 1)
    throw std::invalid_argument("iw and flow must be >= 1");
  if (ingress_rate_mbps <= net.bandwidth_mbps)
    throw std::invalid_argument("ingress rate must exceed the bottleneck");

  const double wire_bits = net.wire_bytes() * 8.0;
  const double service_ms = wire_bits / (net.bandwidth_mbps * 1e6) * 1e3;
  const double ingress_ms = wire_bits / (ingress_rate_mbps * 1e6) * 1e3;
  const std::uint32_t total_segments =
      static_cast<std::uint32_t>((flow_bytes + net.mss - 1) / net.mss);

  FlowResult result;
  std::vector<bool> received(total_segments, false);
  std::deque<std::uint32_t> retransmit_queue;
  std::uint32_t next_new = 0;
  std::uint32_t delivered = 0;
  double cwnd = iw_segments;
  double t = 0.0;            // sender clock, flight start
  double last_arrival = 0.0;

  while (delivered < total_segments) {
    if (result.roundtrips >= 10'000)
      throw std::runtime_error("queue_sim did not converge");
    ++result.roundtrips;

    // Compose the flight: retransmissions first, then new segments.
    std::vector<std::uint32_t> flight;
    const std::uint32_t budget =
        std::max<std::uint32_t>(1, static_cast<std::uint32_t>(cwnd));
    while (!retransmit_queue.empty() && flight.size() < budget) {
      flight.push_back(retransmit_queue.front());
      retransmit_queue.pop_front();
      ++result.retransmissions;
    }
    while (next_new < total_segments && flight.size() < budget)
      flight.push_back(next_new++);

    // Burst into the (empty) drop-tail queue at ingress spacing.
    std::vector<double> departures;
    std::size_t head = 0;
    std::uint32_t flight_drops = 0;
    double last_dep = t;
    std::vector<std::uint32_t> lost;
    for (std::size_t i = 0; i < flight.size(); ++i) {
      const double arrival = t + static_cast<double>(i) * ingress_ms;
      while (head < departures.size() && departures[head] <= arrival) ++head;
      const std::size_t in_system = departures.size() - head;
      if (in_system == 0) {
        departures.push_back(arrival + service_ms);
      } else if (in_system - 1 < net.queue_limit) {
        departures.push_back(departures.back() + service_ms);
      } else {
        ++flight_drops;
        lost.push_back(flight[i]);
        continue;
      }
      last_dep = departures.back();
      const std::uint32_t seg = flight[i];
      if (!received[seg]) {
        received[seg] = true;
        ++delivered;
      }
      last_arrival = std::max(last_arrival, departures.back() + net.rtt_ms / 2);
    }
    if (result.roundtrips == 1) result.first_flight_drops = flight_drops;

    for (std::uint32_t seg : lost) retransmit_queue.push_back(seg);
    if (flight_drops == 0)
      cwnd += static_cast<double>(flight.size());  // slow-start doubling
    else
      cwnd = std::max(1.0, cwnd / 2.0);

    // Next flight starts when the last ACK of this one returns.
    t = last_dep + net.rtt_ms;
  }

  result.afct_ms = net.rtt_ms + last_arrival;  // handshake + last byte
  return result;
}

void sweep_grid(const GridSpec& grid, std::ostream& csv) {
  if (grid.iws.empty() || grid.flows.empty() || grid.nets.empty())
    throw std::invalid_argument("sweep_grid: empty dimension");

  auto nets = grid.nets;
  std::sort(nets.begin(), nets.end(), [](const auto& a, const auto& b) {
    if (a.bandwidth_mbps != b.bandwidth_mbps)
      return a.bandwidth_mbps < b.bandwidth_mbps;
    if (a.rtt_ms != b.rtt_ms) return a.rtt_ms < b.rtt_ms;
    return a.queue_limit < b.queue_limit;
  });
  auto iws = grid.iws;
  std::sort(iws.begin(), iws.end());
  auto flows = grid.flows;
  std::sort(flows.begin(), flows.end());

  csv << "bandwidth_mbps,rtt_ms,queue_limit,flow_bytes,iw_segments,"
         "roundtrips,afct_analytic_ms,afct_sim_ms,retransmissions,"
         "first_flight_drops\n";
  char buf[256];
  for (const auto& net : nets)
    for (const auto flow : flows)
      for (const auto iw : iws) {
        const double analytic = afct_analytic_ms(iw, flow, net);
        const FlowResult sim = queue_sim(iw, flow, net, grid.ingress_rate_mbps);
        std::snprintf(buf, sizeof buf, "%g,%g,%u,%llu,%u,%u,%.3f,%.3f,%u,%u\n",
                      net.bandwidth_mbps, net.rtt_ms, net.queue_limit,
                      static_cast<unsigned long long>(flow), iw,
                      sim.roundtrips, analytic, sim.afct_ms,
                      sim.retransmissions, sim.first_flight_drops);
        csv << buf;
      }
}

}  // namespace iwprobe::flowmodel
