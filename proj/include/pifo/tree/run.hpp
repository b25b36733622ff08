#pragma once

#include <vector>

#include "pifo/log.hpp"
#include "pifo/tree/state.hpp"
#include "pifo/tree/tree.hpp"

namespace pifo::tree {

// Replays a trace through the behavioral tree model. One deterministic
// loop per tick: release matured shaping entries, admit arrivals, then
// start one transmission if the link is free. At most one packet
// departs per tick; transmission occupies the link for
// ceil(length / line_rate) ticks.
inline RunResult run_behavioral(const ValidatedTree& tree,
                                const std::vector<PacketRecord>& trace,
                                std::int64_t line_rate_bytes_per_tick, Tick horizon,
                                std::size_t capacity = PifoBlock::kDefaultCapacity) {
  SchedTreeState st(tree, capacity);
  RunResult out;
  std::size_t next = 0;
  Tick busy_until = 0;

  for (Tick tick = 0; tick < horizon; ++tick) {
    st.release_shaped(tick);
    while (next < trace.size() && trace[next].arrival_tick == tick)
      st.enqueue_packet(trace[next++], tick);
    if (tick >= busy_until && !st.root_empty()) {
      PacketRecord pkt = st.dequeue_packet(tick);
      out.log.push_back({pkt.packet_id, pkt.flow_id, pkt.arrival_tick, tick, pkt.length});
      Tick tx = (pkt.length + line_rate_bytes_per_tick - 1) / line_rate_bytes_per_tick;
      busy_until = tick + std::max<Tick>(tx, 1);
    }
    if (next >= trace.size() && st.empty()) break;
  }
  out.horizon_exceeded = !st.empty();
  out.drops = st.drops();
  out.events = st.events();
  return out;
}

}  // namespace pifo::tree
