#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pifo/core.hpp"
#include "pifo/tree/tree.hpp"

namespace pifo::mesh {

struct LogicalPifoDesc {
  LogicalPifoId id = 0;     // tree-wide logical pifo id
  tree::NodeId node = 0;
  bool shaping = false;
  bool holds_packets = false;  // leaf scheduling pifo
  std::string name;
};

enum class NextHopAction { EnqueueTo, DequeueFrom, Transmit };

// Lookup entry consulted after a dequeue: what to do with the popped
// element. For DequeueFrom the target logical pifo comes from the
// element's metadata (the reference it carries); only the target block
// is fixed by the table.
struct NextHopEntry {
  BlockId block = 0;
  LogicalPifoId pifo = 0;
  ElementKind kind = ElementKind::Packet;
  NextHopAction action = NextHopAction::Transmit;
  BlockId target_block = 0;
  LogicalPifoId target_pifo = 0;   // EnqueueTo only
  bool pifo_from_metadata = false; // DequeueFrom: target pifo is the popped ref
};

struct BlockDesc {
  BlockId id = 0;
  std::vector<LogicalPifoDesc> pifos;
};

struct MeshConfig {
  std::vector<BlockDesc> blocks;
  std::vector<NextHopEntry> next_hop;
  std::size_t max_blocks = 5;

  BlockId block_of(LogicalPifoId pifo) const {
    for (const auto& b : blocks)
      for (const auto& p : b.pifos)
        if (p.id == pifo) return b.id;
    throw Error(ErrorCode::UnknownLogicalPifo, "pifo " + std::to_string(pifo) + " not placed");
  }

  const NextHopEntry* lookup(BlockId block, LogicalPifoId pifo, ElementKind kind) const {
    for (const auto& e : next_hop)
      if (e.block == block && e.pifo == pifo && e.kind == kind) return &e;
    return nullptr;
  }
};

// Canonical, diff-stable text form (fixed key order, ids ascending).
inline std::string to_text(const MeshConfig& cfg) {
  std::ostringstream out;
  out << "mesh-config\n";
  out << "max-blocks " << cfg.max_blocks << "\n";
  for (const auto& b : cfg.blocks) {
    out << "block " << b.id << "\n";
    for (const auto& p : b.pifos)
      out << "  pifo " << p.id << " " << (p.shaping ? "shaping" : "sched") << " " << p.name
          << "\n";
  }
  for (const auto& e : cfg.next_hop) {
    out << "next-hop block " << e.block << " pifo " << e.pifo << " "
        << (e.kind == ElementKind::Packet ? "packet" : "ref") << " -> ";
    switch (e.action) {
      case NextHopAction::Transmit:
        out << "transmit";
        break;
      case NextHopAction::DequeueFrom:
        out << "dequeue block " << e.target_block << " pifo "
            << (e.pifo_from_metadata ? std::string("*") : std::to_string(e.target_pifo));
        break;
      case NextHopAction::EnqueueTo:
        out << "enqueue block " << e.target_block << " pifo " << e.target_pifo;
        break;
    }
    out << "\n";
  }
  return out.str();
}

struct Diagnostic {
  std::string code;  // MissingNextHop, PortBudgetConflict, DequeueCycle
  std::string message;
};

}  // namespace pifo::mesh
