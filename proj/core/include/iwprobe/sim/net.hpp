#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "iwprobe/probe/transport.hpp"
#include "iwprobe/sim/world.hpp"

namespace iwprobe::sim {

// Oriented from the client's perspective.
struct Flow {
  Endpoint client;
  Endpoint server;

  std::string key() const {
    return to_string(client) + ">" + to_string(server);
  }
  bool operator==(const Flow&) const = default;
};

class Net;

class Listener {
 public:
  virtual ~Listener() = default;
  virtual void on_segment(Net& net, const Flow& flow,
                          const probe::TcpSegment& seg, TimeNs arrival) = 0;
};

struct TapEntry {
  Flow flow;
  bool to_server = false;
  bool dropped = false;
  probe::TcpSegment segment;
  TimeNs sent_ns = 0;
  TimeNs deliver_ns = 0;
};

// In-process emulated network: endpoints, per-flow inboxes, one-way delays,
// an injectable drop predicate, and a packet tap for tests. Everything runs
// on the owning World's virtual clock.
class Net {
 public:
  explicit Net(World& world) : world_(world) {}

  World& world() { return world_; }

  void listen(const Endpoint& ep, Listener* listener);
  void unlisten(const Endpoint& ep);

  // Client side. The returned transport owns the flow's inbox.
  std::unique_ptr<probe::Transport> connect(const Flow& flow);

  // Used by transports (to_server) and origins (!to_server).
  void transmit(const Flow& flow, const probe::TcpSegment& seg, bool to_server,
                TimeNs extra_delay);

  // Delay injection. Both directions get a small floor so that timestamps in
  // one connection are strictly ordered and handshake RTTs stay positive.
  void set_client_to_server_delay(TimeNs d) { c2s_delay_ = d; }
  void set_delay_floor(TimeNs d) { delay_floor_ = d; }

  // Loss injection at the network level (origin-side drop plans live in the
  // origin itself). Return true to drop.
  using DropFn = std::function<bool(const probe::TcpSegment&, bool to_server)>;
  void set_drop_fn(DropFn fn) { drop_fn_ = std::move(fn); }

  const std::vector<TapEntry>& tap() const { return tap_; }

  struct Inbox {
    std::deque<probe::Delivered> queue;
  };

  // Transport plumbing; connect() wires these up.
  void register_inbox(const std::string& flow_key, Inbox* inbox);
  void unregister_inbox(const std::string& flow_key, Inbox* inbox);

 private:
  void deliver_to_client(const Flow& flow, const probe::TcpSegment& seg,
                         TimeNs arrival);

  World& world_;
  TimeNs c2s_delay_ = 0;
  TimeNs delay_floor_ = 500;  // 0.5 us
  DropFn drop_fn_;
  std::map<std::string, Listener*> listeners_;     // by server endpoint
  std::map<std::string, Inbox*> inboxes_;          // by flow key
  std::vector<TapEntry> tap_;
};

}  // namespace iwprobe::sim
