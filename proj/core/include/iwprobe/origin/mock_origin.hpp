#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iwprobe/origin/config.hpp"
#include "iwprobe/sim/net.hpp"

namespace iwprobe::origin {

// Configurable HTTP-over-TCP origin used as the validation oracle: sends an
// IW-limited first flight, applies the drop plan and the pacing schedule,
// retransmits the earliest unacked segment on RTO with exponential backoff,
// and honors the peer's advertised window when ACKs start arriving.
class MockOrigin final : public sim::Listener {
 public:
  enum class LogKind : std::uint8_t {
    kRecv,        // inbound segment
    kSend,        // first transmission that reached the network
    kDrop,        // first transmission suppressed by the drop plan
    kRetransmit,  // RTO-driven retransmission that reached the network
    kRetransmitDrop,
    kReject,      // malformed request -> 400
    kClose,
  };

  struct LogEntry {
    TimeNs t = 0;
    LogKind kind = LogKind::kRecv;
    std::uint64_t seq_offset = 0;
    std::uint32_t len = 0;
  };

  struct SessionLog {
    sim::Flow flow;
    std::uint32_t segment_size = 0;
    std::uint64_t iw_bytes = 0;
    std::uint64_t first_flight_bytes = 0;
    std::vector<LogEntry> entries;
    bool closed = false;

    std::uint32_t count(LogKind kind) const;
  };

  MockOrigin(sim::Net& net, Endpoint listen, OriginConfig config,
             std::uint64_t seed = 1);
  ~MockOrigin() override;

  MockOrigin(const MockOrigin&) = delete;
  MockOrigin& operator=(const MockOrigin&) = delete;

  void on_segment(sim::Net& net, const sim::Flow& flow,
                  const probe::TcpSegment& seg, TimeNs arrival) override;

  const std::list<SessionLog>& sessions() const { return logs_; }
  const OriginConfig& config() const { return config_; }

 private:
  struct Session {
    sim::Flow flow;
    SessionLog* log = nullptr;
    std::uint32_t my_isn = 0;
    std::uint32_t peer_isn = 0;
    std::uint16_t peer_mss = 536;
    std::uint8_t peer_ws = 0;
    std::uint32_t segment_size = 536;
    std::uint64_t iw_bytes = 0;
    std::uint64_t object_size = 0;
    std::uint64_t snd_una = 0;
    std::uint64_t snd_nxt = 0;
    std::uint64_t peer_window = 0;
    struct SentSeg {
      std::uint64_t offset;
      std::uint32_t len;
    };
    std::vector<SentSeg> sent;
    std::string request_buf;
    std::string response_head;
    TimeNs synack_sent = 0;
    TimeNs rtt_estimate = 0;
    std::uint64_t rto_generation = 0;
    std::uint32_t consecutive_retrans = 0;
    bool established = false;
    bool responding = false;
    bool closed = false;
  };

  Session& session_for(const sim::Flow& flow);
  void handle_syn(Session& s, const probe::TcpSegment& seg);
  void handle_request_data(Session& s, const probe::TcpSegment& seg);
  void handle_ack(Session& s, const probe::TcpSegment& seg);
  void start_response(Session& s);
  void send_new_data(Session& s);
  void emit(Session& s, std::uint64_t offset, std::uint32_t len,
            bool retransmission, TimeNs extra_delay);
  bool drop_first_transmission(const Session& s, std::uint32_t index,
                               std::uint32_t total);
  void arm_rto(Session& s);
  void on_rto(Session& s, std::uint64_t generation);
  void close(Session& s);
  std::string payload_at(const Session& s, std::uint64_t offset,
                         std::uint32_t len) const;

  sim::Net& net_;
  Endpoint listen_;
  OriginConfig config_;
  std::mt19937_64 rng_;
  std::list<Session> sessions_;
  std::list<SessionLog> logs_;
};

}  // namespace iwprobe::origin
