#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "pifo/log.hpp"
#include "pifo/mesh/config.hpp"
#include "pifo/tree/state.hpp"

namespace pifo::mesh {

// Cycle-driven model of the compiled mesh. Each block exposes one
// enqueue port and one dequeue port per cycle; everything that moves in
// a cycle must claim its ports up front. External arrivals claim their
// enqueue footprint first, so a shaping release contending for the same
// ports slips to a later cycle (a Defer event; the worst slip is
// reported as max_deferral). Within a cycle: releases, then the
// arrival, then one dequeue chain if the output link is free.
class MeshSim {
 public:
  MeshSim(const tree::ValidatedTree& tree, const MeshConfig& cfg,
          std::int64_t line_rate_bytes_per_tick,
          std::size_t capacity = PifoBlock::kDefaultCapacity)
      : tree_(&tree), cfg_(&cfg), rate_(line_rate_bytes_per_tick), st_(tree, capacity) {}

  RunResult run(const std::vector<PacketRecord>& trace, Tick horizon) {
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (trace[i].arrival_tick <= trace[i - 1].arrival_tick)
        throw Error(ErrorCode::InvalidSpec,
                    "mesh traces must be time-sorted with at most one arrival per tick");
    RunResult out;
    std::size_t next = 0;
    Tick busy_until = 0;
    for (Tick now = 0; now < horizon; ++now) {
      step(now, trace, next, busy_until, out);
      if (next == trace.size() && st_.empty()) break;
    }
    out.horizon_exceeded = !st_.empty() ||
                           (!trace.empty() && next < trace.size());
    out.drops = st_.drops();
    for (const auto& e : st_.events()) out.events.push_back(e);
    return out;
  }

  const tree::SchedTreeState& state() const { return st_; }

 private:
  void step(Tick now, const std::vector<PacketRecord>& trace, std::size_t& next,
            Tick& busy_until, RunResult& out) {
    std::map<BlockId, int> enq_used, deq_used;
    auto claim = [](std::map<BlockId, int>& ports, BlockId b) {
      if (++ports[b] > 1)
        throw Error(ErrorCode::InvalidSpec,
                    "port budget violated at block " + std::to_string(b));
    };

    const PacketRecord* arrival =
        next < trace.size() && trace[next].arrival_tick == now ? &trace[next] : nullptr;
    if (arrival)
      for (LogicalPifoId lp : st_.enqueue_footprint(*arrival))
        claim(enq_used, cfg_->block_of(lp));

    // Matured shaping heads, oldest intended release first. Each
    // successful release consumes its ports; re-scan because popping a
    // head can expose another matured entry behind it.
    bool progress = true;
    while (progress) {
      progress = false;
      for (const auto& cand : st_.matured_releases(now)) {
        BlockId sblk = cfg_->block_of(*tree_->node(cand.node).shaping_pifo);
        auto fp = st_.release_footprint(cand.node);
        bool free = deq_used[sblk] == 0;
        for (LogicalPifoId lp : fp) free = free && enq_used[cfg_->block_of(lp)] == 0;
        if (!free) continue;
        claim(deq_used, sblk);
        for (LogicalPifoId lp : fp) claim(enq_used, cfg_->block_of(lp));
        out.max_deferral = std::max(out.max_deferral, now - static_cast<Tick>(cand.due));
        st_.release_one(cand.node, now);
        progress = true;
        break;
      }
    }
    for (const auto& cand : st_.matured_releases(now))
      out.events.push_back({now, EventKind::Defer,
                            "release at node " + std::to_string(cand.node) + " due " +
                                std::to_string(cand.due) + " waits for ports"});

    if (arrival) {
      st_.enqueue_packet(*arrival, now);
      ++next;
    }

    if (now >= busy_until && !st_.root_empty()) {
      PacketRecord pkt = st_.dequeue_packet(now);
      for (tree::NodeId id : tree_->path_for(pkt))
        claim(deq_used, cfg_->block_of(tree_->node(id).sched_pifo));
      out.log.push_back({pkt.packet_id, pkt.flow_id, pkt.arrival_tick, now, pkt.length});
      Tick tx = (pkt.length + rate_ - 1) / rate_;
      busy_until = now + std::max<Tick>(tx, 1);
    }
  }

  const tree::ValidatedTree* tree_;
  const MeshConfig* cfg_;
  std::int64_t rate_;
  tree::SchedTreeState st_;
};

inline RunResult run_mesh(const tree::ValidatedTree& tree, const MeshConfig& cfg,
                          const std::vector<PacketRecord>& trace,
                          std::int64_t line_rate_bytes_per_tick, Tick horizon,
                          std::size_t capacity = PifoBlock::kDefaultCapacity) {
  MeshSim sim(tree, cfg, line_rate_bytes_per_tick, capacity);
  return sim.run(trace, horizon);
}

}  // namespace pifo::mesh
