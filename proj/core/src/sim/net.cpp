#include "iwprobe/sim/net.hpp"

#include <algorithm>

namespace iwprobe::sim {

namespace {

class SimTransport final : public probe::Transport {
 public:
  SimTransport(Net& net, Flow flow) : net_(net), flow_(std::move(flow)) {
    net_.register_inbox(flow_.key(), &inbox_);
  }
  ~SimTransport() override { net_.unregister_inbox(flow_.key(), &inbox_); }

  TimeNs now() override { return net_.world().now(); }

  void send(const probe::TcpSegment& segment) override {
    net_.transmit(flow_, segment, /*to_server=*/true, 0);
  }

  std::optional<probe::Delivered> receive(TimeNs deadline) override {
    for (;;) {
      if (!inbox_.queue.empty()) {
        probe::Delivered d = inbox_.queue.front();
        inbox_.queue.pop_front();
        return d;
      }
      if (net_.world().next_event_time() > deadline) {
        net_.world().run_until(deadline);
        return std::nullopt;
      }
      net_.world().run_one();
    }
  }

  void sleep_until(TimeNs t) override { net_.world().run_until(t); }

 private:
  Net& net_;
  Flow flow_;
  Net::Inbox inbox_;
};

}  // namespace

void Net::register_inbox(const std::string& flow_key, Inbox* inbox) {
  inboxes_[flow_key] = inbox;
}

void Net::unregister_inbox(const std::string& flow_key, Inbox* inbox) {
  auto it = inboxes_.find(flow_key);
  if (it != inboxes_.end() && it->second == inbox) inboxes_.erase(it);
}

void Net::listen(const Endpoint& ep, Listener* listener) {
  listeners_[to_string(ep)] = listener;
}

void Net::unlisten(const Endpoint& ep) { listeners_.erase(to_string(ep)); }

std::unique_ptr<probe::Transport> Net::connect(const Flow& flow) {
  return std::make_unique<SimTransport>(*this, flow);
}

void Net::transmit(const Flow& flow, const probe::TcpSegment& seg,
                   bool to_server, TimeNs extra_delay) {
  const TimeNs base = to_server ? c2s_delay_ : 0;
  const TimeNs delay = std::max(base + extra_delay, delay_floor_);
  const TimeNs arrival = world_.now() + delay;
  const bool dropped = drop_fn_ && drop_fn_(seg, to_server);
  tap_.push_back(TapEntry{flow, to_server, dropped, seg, world_.now(), arrival});
  if (dropped) return;

  if (to_server) {
    auto it = listeners_.find(to_string(flow.server));
    if (it == listeners_.end()) return;  // unreachable target: silent drop
    Listener* listener = it->second;
    probe::TcpSegment copy = seg;
    world_.schedule_at(arrival, [this, listener, flow, copy, arrival] {
      listener->on_segment(*this, flow, copy, arrival);
    });
  } else {
    probe::TcpSegment copy = seg;
    world_.schedule_at(arrival, [this, flow, copy, arrival] {
      deliver_to_client(flow, copy, arrival);
    });
  }
}

void Net::deliver_to_client(const Flow& flow, const probe::TcpSegment& seg,
                            TimeNs arrival) {
  auto it = inboxes_.find(flow.key());
  if (it == inboxes_.end()) return;  // client gone (after RST teardown)
  it->second->queue.push_back(probe::Delivered{seg, arrival});
}

}  // namespace iwprobe::sim
