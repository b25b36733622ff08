#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "pifo/errors.hpp"
#include "pifo/packet.hpp"

namespace pifo {

using LogicalPifoId = std::uint32_t;
using BlockId = std::uint32_t;

enum class ElementKind { Packet, PifoRef };

// An element buffered in a PIFO: either a packet or a reference to
// another logical PIFO. Ordered by (rank, seq); seq is assigned at
// push time so equal ranks dequeue first-in first-out.
struct PifoElement {
  ElementKind kind = ElementKind::Packet;
  std::shared_ptr<const PacketRecord> packet;  // when kind == Packet
  LogicalPifoId pifo_ref = 0;                  // when kind == PifoRef
  Rank rank = 0;
  std::uint64_t seq = 0;
  std::uint32_t metadata = 0;
  FlowId flow_id = 0;

  static PifoElement make_packet(std::shared_ptr<const PacketRecord> pkt, Rank rank) {
    PifoElement e;
    e.kind = ElementKind::Packet;
    e.packet = std::move(pkt);
    e.rank = rank;
    e.flow_id = e.packet->flow_id;
    return e;
  }

  static PifoElement make_ref(LogicalPifoId target, Rank rank, FlowId flow = 0) {
    PifoElement e;
    e.kind = ElementKind::PifoRef;
    e.pifo_ref = target;
    e.rank = rank;
    e.flow_id = flow;
    e.metadata = target;
    return e;
  }
};

struct PifoElementOrder {
  bool operator()(const PifoElement& a, const PifoElement& b) const {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.seq < b.seq;
  }
};

// One logical PIFO: a rank-ordered multiset admitting push at any
// rank-determined position, popping only from the head.
class LogicalPifo {
 public:
  LogicalPifo() = default;
  explicit LogicalPifo(LogicalPifoId id) : id_(id) {}

  LogicalPifoId id() const { return id_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }

  // Returns the assigned sequence number.
  std::uint64_t push(PifoElement elem) {
    elem.seq = next_seq_++;
    std::uint64_t seq = elem.seq;
    elements_.insert(std::move(elem));
    return seq;
  }

  const PifoElement& head() const {
    if (elements_.empty()) throw Error(ErrorCode::EmptyPifo, "head of empty pifo");
    return *elements_.begin();
  }

  PifoElement pop() {
    if (elements_.empty()) throw Error(ErrorCode::EmptyPifo, "pop from empty pifo");
    auto it = elements_.begin();
    PifoElement e = *it;
    elements_.erase(it);
    return e;
  }

  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

 private:
  LogicalPifoId id_ = 0;
  std::uint64_t next_seq_ = 0;
  std::set<PifoElement, PifoElementOrder> elements_;
};

// A PIFO block hosting multiple logical PIFOs under one shared
// element-capacity budget. Overflowing pushes are tail-dropped and
// counted.
class PifoBlock {
 public:
  static constexpr std::size_t kDefaultCapacity = 65536;

  explicit PifoBlock(BlockId id = 0, std::size_t capacity = kDefaultCapacity)
      : id_(id), capacity_(capacity) {}

  BlockId id() const { return id_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t occupancy() const { return occupancy_; }
  std::uint64_t drops() const { return drops_; }

  void add_logical_pifo(LogicalPifoId id) { pifos_.emplace(id, LogicalPifo(id)); }
  bool has_logical_pifo(LogicalPifoId id) const { return pifos_.count(id) != 0; }

  const LogicalPifo& pifo(LogicalPifoId id) const { return find(id); }

  std::uint64_t enqueue(LogicalPifoId id, PifoElement elem) {
    LogicalPifo& p = find(id);
    if (occupancy_ >= capacity_) {
      ++drops_;
      throw Error(ErrorCode::CapacityExceeded, "block " + std::to_string(id_) + " full");
    }
    std::uint64_t seq = p.push(std::move(elem));
    ++occupancy_;
    return seq;
  }

  PifoElement dequeue(LogicalPifoId id) {
    LogicalPifo& p = find(id);
    PifoElement e = p.pop();  // throws EmptyPifo
    --occupancy_;
    return e;
  }

 private:
  LogicalPifo& find(LogicalPifoId id) {
    auto it = pifos_.find(id);
    if (it == pifos_.end())
      throw Error(ErrorCode::UnknownLogicalPifo, "logical pifo " + std::to_string(id));
    return it->second;
  }
  const LogicalPifo& find(LogicalPifoId id) const {
    return const_cast<PifoBlock*>(this)->find(id);
  }

  BlockId id_ = 0;
  std::size_t capacity_ = kDefaultCapacity;
  std::size_t occupancy_ = 0;
  std::uint64_t drops_ = 0;
  std::map<LogicalPifoId, LogicalPifo> pifos_;
};

}  // namespace pifo
