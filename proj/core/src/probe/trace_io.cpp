#include "iwprobe/probe/trace_io.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace iwprobe::probe {

using nlohmann::ordered_json;

void write_trace_jsonl(std::ostream& os, const ProbeTrace& trace) {
  for (const auto& ev : trace.events) {
    ordered_json j;
    j["dir"] = ev.dir == Direction::kInbound ? "in" : "out";
    j["seq_offset"] = ev.seq_offset;
    j["len"] = ev.payload_len;
    j["flags"] = flags_to_string(ev.flags);
    j["ts_ns"] = ev.ts;
    os << j.dump() << '\n';
  }
}

std::string trace_to_jsonl(const ProbeTrace& trace) {
  std::ostringstream os;
  write_trace_jsonl(os, trace);
  return os.str();
}

std::vector<SegmentEvent> read_trace_jsonl(std::istream& is) {
  std::vector<SegmentEvent> events;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = ordered_json::parse(line);
    SegmentEvent ev;
    ev.dir = j.at("dir").get<std::string>() == "in" ? Direction::kInbound
                                                    : Direction::kOutbound;
    ev.seq_offset = j.at("seq_offset");
    ev.payload_len = j.at("len");
    ev.flags = flags_from_string(j.at("flags").get<std::string>());
    ev.ts = j.at("ts_ns");
    events.push_back(ev);
  }
  return events;
}

}  // namespace iwprobe::probe
