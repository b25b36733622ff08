#pragma once

#include <limits>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "pifo/core.hpp"
#include "pifo/log.hpp"
#include "pifo/tree/tree.hpp"
#include "pifo/txn/interp.hpp"

namespace pifo::tree {

// Behavioral state of one scheduling tree: per-node transaction state,
// all logical PIFOs in one backing store, and the suspended paths
// parked behind shaping entries.
class SchedTreeState {
 public:
  explicit SchedTreeState(const ValidatedTree& tree,
                          std::size_t capacity = PifoBlock::kDefaultCapacity)
      : tree_(&tree),
        capacity_(capacity),
        block_(0, std::numeric_limits<std::size_t>::max()) {
    rts_.resize(tree.nodes.size());
    for (const auto& n : tree.nodes) {
      NodeRt& rt = rts_[n.id];
      rt.sched_params = txn::scale_params(*n.sched_txn, n.sched_params);
      rt.sched_state = txn::init_state(*n.sched_txn, rt.sched_params);
      if (n.shaping_txn) {
        rt.shaping_params = txn::scale_params(*n.shaping_txn, n.shaping_params);
        rt.shaping_state = txn::init_state(*n.shaping_txn, rt.shaping_params);
      }
      block_.add_logical_pifo(n.sched_pifo);
      if (n.shaping_pifo) block_.add_logical_pifo(*n.shaping_pifo);
    }
  }

  // Walks leaf -> root executing the scheduling transaction at each
  // node; suspends at the first node carrying a shaping transaction.
  // Admission is all-or-nothing: if the packet's full path cannot fit
  // under the element capacity, it is dropped before any transaction
  // runs.
  void enqueue_packet(const PacketRecord& pkt, Tick now) {
    const auto& path = tree_->path_for(pkt);
    std::size_t cost = path_cost(path);
    if (reserved_ + cost > capacity_) {
      ++drops_;
      events_.push_back({now, EventKind::Drop, "packet " + std::to_string(pkt.packet_id)});
      return;
    }
    reserved_ += cost;
    walk(std::make_shared<PacketRecord>(pkt), path, 0, now);
  }

  // Releases every shaping entry whose wall-clock rank has arrived,
  // resuming each suspended path at the parent. Returns the count.
  std::size_t release_shaped(Tick now) {
    std::size_t released = 0;
    for (const auto& n : tree_->nodes) {
      if (!n.shaping_pifo) continue;
      while (!block_.pifo(*n.shaping_pifo).empty() &&
             block_.pifo(*n.shaping_pifo).head().rank <= static_cast<Rank>(now)) {
        PifoElement e = block_.dequeue(*n.shaping_pifo);
        auto it = suspended_.find({*n.shaping_pifo, e.seq});
        if (it == suspended_.end())
          throw Error(ErrorCode::BrokenChain, "shaping entry without suspended path");
        Suspended s = std::move(it->second);
        suspended_.erase(it);
        walk(s.pkt, s.path, s.resume_index, now);
        ++released;
      }
    }
    return released;
  }

  // Pops the root, follows the PIFO-reference chain to a leaf, and
  // returns the packet. Fires dequeue hooks along the way.
  PacketRecord dequeue_packet(Tick now) {
    LogicalPifoId lp = tree_->node(tree_->root).sched_pifo;
    if (block_.pifo(lp).empty()) throw Error(ErrorCode::EmptyPifo, "root pifo empty");
    for (;;) {
      PifoElement e = block_.dequeue(lp);
      const SchedNode& nd = tree_->node(static_cast<NodeId>(lp));
      fire_hook(nd, lp, e, now);
      if (e.kind == ElementKind::Packet) {
        reserved_ -= path_cost(tree_->path_for(*e.packet));
        return *e.packet;
      }
      lp = e.pifo_ref;
      if (block_.pifo(lp).empty())
        throw Error(ErrorCode::BrokenChain,
                    "reference to empty pifo " + std::to_string(lp));
    }
  }

  // --- fine-grained interface for the mesh simulator ---------------

  struct ReleaseCandidate {
    NodeId node = 0;
    Rank due = 0;
    std::uint64_t seq = 0;
  };

  // Shaping-pifo heads whose release time has arrived, ordered FIFO by
  // intended release tick (ties by node id, then enqueue order).
  std::vector<ReleaseCandidate> matured_releases(Tick now) const {
    std::vector<ReleaseCandidate> out;
    for (const auto& n : tree_->nodes) {
      if (!n.shaping_pifo) continue;
      const auto& sp = block_.pifo(*n.shaping_pifo);
      if (!sp.empty() && sp.head().rank <= static_cast<Rank>(now))
        out.push_back({n.id, sp.head().rank, sp.head().seq});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.due, a.node, a.seq) < std::tie(b.due, b.node, b.seq);
    });
    return out;
  }

  // Logical pifos an admission (or a release of the given node's head)
  // would push into, in walk order.
  std::vector<LogicalPifoId> enqueue_footprint(const PacketRecord& pkt) const {
    return walk_footprint(tree_->path_for(pkt), 0);
  }

  std::vector<LogicalPifoId> release_footprint(NodeId shaping_node) const {
    const SchedNode& n = tree_->node(shaping_node);
    const auto& sp = block_.pifo(*n.shaping_pifo);
    const Suspended& s = suspended_.at({*n.shaping_pifo, sp.head().seq});
    return walk_footprint(s.path, s.resume_index);
  }

  // Releases exactly the head entry of one shaping pifo.
  void release_one(NodeId shaping_node, Tick now) {
    const SchedNode& n = tree_->node(shaping_node);
    PifoElement e = block_.dequeue(*n.shaping_pifo);
    auto it = suspended_.find({*n.shaping_pifo, e.seq});
    if (it == suspended_.end())
      throw Error(ErrorCode::BrokenChain, "shaping entry without suspended path");
    Suspended s = std::move(it->second);
    suspended_.erase(it);
    walk(s.pkt, s.path, s.resume_index, now);
  }

  bool root_empty() const {
    return block_.pifo(tree_->node(tree_->root).sched_pifo).empty();
  }
  bool empty() const { return block_.occupancy() == 0; }
  std::size_t buffered_elements() const { return block_.occupancy(); }
  std::size_t pending_shaped() const { return suspended_.size(); }
  std::uint64_t drops() const { return drops_; }
  const std::vector<EventRecord>& events() const { return events_; }
  const PifoBlock& block() const { return block_; }
  const ValidatedTree& tree() const { return *tree_; }

 private:
  struct NodeRt {
    txn::TxnState sched_state;
    txn::TxnState shaping_state;
    std::map<std::string, fx> sched_params;
    std::map<std::string, fx> shaping_params;
  };

  struct Suspended {
    std::shared_ptr<const PacketRecord> pkt;
    std::vector<NodeId> path;
    std::size_t resume_index = 0;
  };

  std::vector<LogicalPifoId> walk_footprint(const std::vector<NodeId>& path,
                                            std::size_t start) const {
    std::vector<LogicalPifoId> fp;
    for (std::size_t i = start; i < path.size(); ++i) {
      const SchedNode& nd = tree_->node(path[i]);
      fp.push_back(nd.sched_pifo);
      if (nd.shaping_txn) {
        fp.push_back(*nd.shaping_pifo);
        break;
      }
    }
    return fp;
  }

  std::size_t path_cost(const std::vector<NodeId>& path) const {
    std::size_t cost = path.size();
    for (NodeId id : path)
      if (tree_->node(id).shaping_txn) ++cost;
    return cost;
  }

  void walk(std::shared_ptr<const PacketRecord> pkt, const std::vector<NodeId>& path,
            std::size_t start, Tick now) {
    for (std::size_t i = start; i < path.size(); ++i) {
      const SchedNode& nd = tree_->node(path[i]);
      NodeRt& rt = rts_[nd.id];

      FlowId key;
      fx weight;
      if (i == 0) {
        key = pkt->flow_id;
        weight = to_fx(tree_->flow_weight(key));
      } else {
        NodeId child = path[i - 1];
        key = child;
        weight = to_fx(tree_->node(child).weight);
      }

      auto res = txn::execute_transaction(*nd.sched_txn, rt.sched_state, *pkt, now,
                                          rt.sched_params, weight, key);
      PifoElement elem =
          i == 0 ? PifoElement::make_packet(pkt, res.rank)
                 : PifoElement::make_ref(tree_->node(path[i - 1]).sched_pifo, res.rank, key);
      std::uint64_t seq = block_.enqueue(nd.sched_pifo, std::move(elem));
      if (!nd.sched_txn->on_dequeue.empty())
        hook_snaps_[{nd.sched_pifo, seq}] = std::move(res.fields);

      if (nd.shaping_txn) {
        auto sres = txn::execute_transaction(*nd.shaping_txn, rt.shaping_state, *pkt, now,
                                             rt.shaping_params, weight, key);
        PifoElement sref = PifoElement::make_ref(nd.sched_pifo, sres.rank, key);
        std::uint64_t sseq = block_.enqueue(*nd.shaping_pifo, std::move(sref));
        suspended_[{*nd.shaping_pifo, sseq}] = Suspended{std::move(pkt), path, i + 1};
        return;
      }
    }
  }

  void fire_hook(const SchedNode& nd, LogicalPifoId lp, const PifoElement& e, Tick now) {
    auto it = hook_snaps_.find({lp, e.seq});
    if (it == hook_snaps_.end()) return;
    txn::execute_dequeue_hook(*nd.sched_txn, rts_[nd.id].sched_state, it->second, now,
                              rts_[nd.id].sched_params, e.flow_id);
    hook_snaps_.erase(it);
  }

  const ValidatedTree* tree_;
  std::size_t capacity_;
  std::size_t reserved_ = 0;
  std::uint64_t drops_ = 0;
  PifoBlock block_;
  std::vector<NodeRt> rts_;
  std::map<std::pair<LogicalPifoId, std::uint64_t>, txn::FieldSnapshot> hook_snaps_;
  std::map<std::pair<LogicalPifoId, std::uint64_t>, Suspended> suspended_;
  std::vector<EventRecord> events_;
};

}  // namespace pifo::tree
