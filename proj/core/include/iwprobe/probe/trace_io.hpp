#pragma once

#include <iosfwd>
#include <string>

#include "iwprobe/probe/types.hpp"

namespace iwprobe::probe {

// One event per line: {"dir":..,"seq_offset":..,"len":..,"flags":..,"ts_ns":..}
void write_trace_jsonl(std::ostream& os, const ProbeTrace& trace);
std::string trace_to_jsonl(const ProbeTrace& trace);

// Reads events only; spec/outcome metadata is not part of the wire format.
std::vector<SegmentEvent> read_trace_jsonl(std::istream& is);

}  // namespace iwprobe::probe
