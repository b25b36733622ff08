#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pifo/core.hpp"
#include "pifo/errors.hpp"
#include "pifo/txn/builtins.hpp"
#include "pifo/txn/interp.hpp"
#include "pifo/txn/parser.hpp"

namespace pifo::tree {

using NodeId = std::uint32_t;

// One node of the scheduling tree: a packet predicate, a scheduling
// transaction, and optionally a shaping transaction that delays when
// this node's PIFO becomes visible to its parent.
struct SchedNode {
  NodeId id = 0;
  std::string name;
  std::optional<NodeId> parent;
  std::int64_t weight = 1;  // weight of the edge to the parent's scheduler

  std::string predicate_src;  // empty means "matches everything"
  std::shared_ptr<const txn::Expr> predicate;

  std::shared_ptr<const txn::TransactionProgram> sched_txn;
  std::map<std::string, std::int64_t> sched_params;

  std::shared_ptr<const txn::TransactionProgram> shaping_txn;
  std::map<std::string, std::int64_t> shaping_params;

  // Assigned by validation: logical PIFO ids in the behavioral store.
  LogicalPifoId sched_pifo = 0;
  std::optional<LogicalPifoId> shaping_pifo;

  bool matches(const PacketRecord& pkt) const {
    return !predicate || txn::eval_predicate(*predicate, pkt);
  }
};

struct FlowSpec {
  FlowId id = 0;
  std::int64_t weight = 1;
};

// A structurally checked tree: single root, acyclic, and every flow in
// the declared domain maps to exactly one leaf whose ancestors all
// match. Carries the leaf-to-root path table used on enqueue.
class ValidatedTree {
 public:
  std::vector<SchedNode> nodes;  // indexed by NodeId
  NodeId root = 0;
  std::vector<std::vector<NodeId>> children;     // adjacency, indexed by NodeId
  std::map<FlowId, std::int64_t> flow_weights;   // declared flow domain
  std::map<FlowId, std::vector<NodeId>> paths;   // flow -> leaf..root

  const SchedNode& node(NodeId id) const { return nodes.at(id); }
  bool is_leaf(NodeId id) const { return children.at(id).empty(); }
  std::size_t num_shaping_nodes() const {
    std::size_t n = 0;
    for (const auto& nd : nodes)
      if (nd.shaping_txn) ++n;
    return n;
  }

  // Path (leaf first) for a concrete packet; falls back to the flow
  // domain path table.
  const std::vector<NodeId>& path_for(const PacketRecord& pkt) const {
    auto it = paths.find(pkt.flow_id);
    if (it == paths.end())
      throw Error(ErrorCode::NoLeafMatch,
                  "flow " + std::to_string(pkt.flow_id) + " not in validated domain");
    return it->second;
  }

  std::int64_t flow_weight(FlowId f) const {
    auto it = flow_weights.find(f);
    return it == flow_weights.end() ? 1 : it->second;
  }
};

// Validates tree structure and the predicate nesting rule over the
// declared flow domain, assigns logical PIFO ids, and emits the
// leaf-to-root path table.
inline ValidatedTree validate_tree(std::vector<SchedNode> nodes,
                                   const std::vector<FlowSpec>& flows) {
  ValidatedTree t;
  t.nodes = std::move(nodes);
  t.children.assign(t.nodes.size(), {});

  std::optional<NodeId> root;
  for (const auto& n : t.nodes) {
    if (!n.parent) {
      if (root)
        throw Error(ErrorCode::SemanticError,
                    "multiple roots: '" + t.nodes[*root].name + "' and '" + n.name + "'");
      root = n.id;
    } else {
      if (*n.parent >= t.nodes.size())
        throw Error(ErrorCode::SemanticError, "node '" + n.name + "' has unknown parent");
      t.children[*n.parent].push_back(n.id);
    }
  }
  if (!root) throw Error(ErrorCode::SemanticError, "tree has no root");
  t.root = *root;

  // acyclicity: every node must reach the root within |nodes| hops
  for (const auto& n : t.nodes) {
    NodeId cur = n.id;
    std::size_t hops = 0;
    while (t.nodes[cur].parent) {
      cur = *t.nodes[cur].parent;
      if (++hops > t.nodes.size())
        throw Error(ErrorCode::SemanticError, "cycle through node '" + n.name + "'");
    }
    if (cur != t.root)
      throw Error(ErrorCode::SemanticError, "node '" + n.name + "' does not reach the root");
  }

  if (t.nodes[t.root].shaping_txn)
    throw Error(ErrorCode::SemanticError, "root node cannot have a shaping transaction");

  // logical PIFO ids: scheduling PIFO = node id, shaping PIFOs after
  LogicalPifoId next = static_cast<LogicalPifoId>(t.nodes.size());
  for (auto& n : t.nodes) {
    n.sched_pifo = n.id;
    if (n.shaping_txn) n.shaping_pifo = next++;
  }

  // leaf matching over the flow domain
  for (const FlowSpec& f : flows) {
    t.flow_weights[f.id] = f.weight;
    PacketRecord probe;
    probe.flow_id = f.id;

    std::vector<NodeId> matching_leaves;
    for (const auto& n : t.nodes)
      if (t.is_leaf(n.id) && n.matches(probe)) matching_leaves.push_back(n.id);
    if (matching_leaves.empty())
      throw Error(ErrorCode::NoLeafMatch, "flow " + std::to_string(f.id));
    if (matching_leaves.size() > 1)
      throw Error(ErrorCode::MultipleLeafMatch,
                  "flow " + std::to_string(f.id) + " matches " +
                      std::to_string(matching_leaves.size()) + " leaves");

    std::vector<NodeId> path;
    NodeId cur = matching_leaves[0];
    path.push_back(cur);
    while (t.nodes[cur].parent) {
      cur = *t.nodes[cur].parent;
      if (!t.nodes[cur].matches(probe))
        throw Error(ErrorCode::PredicateNotNested,
                    "flow " + std::to_string(f.id) + " matches leaf '" +
                        t.nodes[matching_leaves[0]].name + "' but not ancestor '" +
                        t.nodes[cur].name + "'");
      path.push_back(cur);
    }
    t.paths[f.id] = std::move(path);
  }
  return t;
}

}  // namespace pifo::tree
