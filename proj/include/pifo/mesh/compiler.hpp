#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "pifo/mesh/config.hpp"
#include "pifo/tree/tree.hpp"

namespace pifo::mesh {

// Maps a validated tree onto a PIFO mesh: one block per tree level
// (root = block 0), and a dedicated block for every shaping PIFO so
// that release-time enqueues and dequeues at arbitrary wall-clock
// times can never collide with a scheduling PIFO's ports. Next-hop
// tables wire the per-packet enqueue and dequeue paths.
inline MeshConfig compile(const tree::ValidatedTree& tree, std::size_t max_blocks = 5) {
  MeshConfig cfg;
  cfg.max_blocks = max_blocks;

  // depth of each node
  std::vector<std::size_t> depth(tree.nodes.size(), 0);
  std::size_t max_depth = 0;
  for (const auto& n : tree.nodes) {
    std::size_t d = 0;
    tree::NodeId cur = n.id;
    while (tree.node(cur).parent) {
      cur = *tree.node(cur).parent;
      ++d;
    }
    depth[n.id] = d;
    max_depth = std::max(max_depth, d);
  }

  std::size_t level_blocks = max_depth + 1;
  std::size_t total_blocks = level_blocks + tree.num_shaping_nodes();
  if (total_blocks > max_blocks)
    throw Error(ErrorCode::TooManyBlocks, std::to_string(total_blocks) + " blocks needed, max " +
                                              std::to_string(max_blocks));

  cfg.blocks.resize(total_blocks);
  for (std::size_t b = 0; b < total_blocks; ++b) cfg.blocks[b].id = static_cast<BlockId>(b);

  // scheduling pifos by level, in node-id order
  for (const auto& n : tree.nodes) {
    LogicalPifoDesc d;
    d.id = n.sched_pifo;
    d.node = n.id;
    d.shaping = false;
    d.holds_packets = tree.is_leaf(n.id);
    d.name = n.name;
    cfg.blocks[depth[n.id]].pifos.push_back(d);
  }
  // shaping pifos each in their own block, appended in node-id order
  BlockId next_block = static_cast<BlockId>(level_blocks);
  for (const auto& n : tree.nodes) {
    if (!n.shaping_pifo) continue;
    LogicalPifoDesc d;
    d.id = *n.shaping_pifo;
    d.node = n.id;
    d.shaping = true;
    d.name = n.name;
    cfg.blocks[next_block++].pifos.push_back(d);
  }

  // next-hop tables
  for (const auto& n : tree.nodes) {
    BlockId blk = static_cast<BlockId>(depth[n.id]);
    if (tree.is_leaf(n.id)) {
      cfg.next_hop.push_back({blk, n.sched_pifo, ElementKind::Packet,
                              NextHopAction::Transmit, 0, 0, false});
    } else {
      // children all live one level down
      cfg.next_hop.push_back({blk, n.sched_pifo, ElementKind::PifoRef,
                              NextHopAction::DequeueFrom, static_cast<BlockId>(depth[n.id] + 1),
                              0, true});
    }
    if (n.shaping_pifo) {
      // release: enqueue the reference into the parent's scheduling pifo
      const auto& parent = tree.node(*n.parent);
      cfg.next_hop.push_back({cfg.block_of(*n.shaping_pifo), *n.shaping_pifo,
                              ElementKind::PifoRef, NextHopAction::EnqueueTo,
                              static_cast<BlockId>(depth[parent.id]), parent.sched_pifo, false});
    }
  }
  return cfg;
}

// Config sanity checks: table closure (everything poppable has a next
// hop), no shaping pifo sharing a block with a scheduling pifo, and
// acyclic dequeue chains.
inline std::vector<Diagnostic> check_config(const MeshConfig& cfg) {
  std::vector<Diagnostic> diags;

  for (const auto& b : cfg.blocks) {
    bool has_sched = false, has_shaping = false;
    for (const auto& p : b.pifos) (p.shaping ? has_shaping : has_sched) = true;
    if (has_sched && has_shaping)
      diags.push_back({"PortBudgetConflict",
                       "block " + std::to_string(b.id) +
                           " hosts a shaping pifo next to a scheduling pifo; its release-time "
                           "enqueue/dequeue can collide with the scheduling pifo's ports"});

    for (const auto& p : b.pifos) {
      ElementKind pops = p.holds_packets ? ElementKind::Packet : ElementKind::PifoRef;
      if (!cfg.lookup(b.id, p.id, pops))
        diags.push_back({"MissingNextHop", "pifo " + std::to_string(p.id) + " (" + p.name +
                                               ") in block " + std::to_string(b.id) +
                                               " has no next-hop for popped " +
                                               (pops == ElementKind::Packet ? "packets" : "refs")});
    }
  }

  // dequeue-chain acyclicity over block graph
  std::map<BlockId, std::vector<BlockId>> edges;
  for (const auto& e : cfg.next_hop)
    if (e.action == NextHopAction::DequeueFrom) edges[e.block].push_back(e.target_block);
  std::set<BlockId> visiting, done;
  std::function<bool(BlockId)> dfs = [&](BlockId b) {
    if (done.count(b)) return false;
    if (visiting.count(b)) return true;
    visiting.insert(b);
    for (BlockId t : edges[b])
      if (dfs(t)) return true;
    visiting.erase(b);
    done.insert(b);
    return false;
  };
  for (const auto& [b, _] : edges)
    if (dfs(b)) {
      diags.push_back({"DequeueCycle", "dequeue chain through block " + std::to_string(b) +
                                           " is cyclic"});
      break;
    }
  return diags;
}

}  // namespace pifo::mesh
