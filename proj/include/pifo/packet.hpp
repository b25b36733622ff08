#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace pifo {

using Tick = std::int64_t;
using FlowId = std::int64_t;
using Rank = std::uint64_t;

// A packet as seen by the scheduler: arrival time, flow, length, and
// any scheduler-visible fields carried in from the trace (slack,
// size, tos, deadline, ...). Field values are plain integers; the
// interpreter scales them to fixed point on read.
struct PacketRecord {
  Tick arrival_tick = 0;
  std::uint64_t packet_id = 0;
  FlowId flow_id = 0;
  std::int64_t length = 0;  // bytes, > 0
  std::map<std::string, std::int64_t> fields;
  Rank rank_out = 0;  // written by the last transaction executed

  std::int64_t field(const std::string& name, std::int64_t fallback = 0) const {
    auto it = fields.find(name);
    return it == fields.end() ? fallback : it->second;
  }
};

}  // namespace pifo
