#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "pifo/core.hpp"
#include "pifo/log.hpp"

namespace pifo::hw {

// One PIFO block at register-transfer granularity: a flow scheduler (an
// array kept sorted by (rank, seq) holding one head element per
// backlogged (flow, logical pifo)) and a rank store (a bank of per-flow
// FIFOs holding everything behind the head). Pushes take a 2-stage
// pipeline, so an element pushed at cycle t is poppable from t+2; a pop
// that leaves the flow backlogged reads the rank store for one cycle
// and reinserts, making the next head poppable at t+3. The same logical
// pifo may therefore only be popped once every 3 cycles. Correct PIFO
// order relies on each flow pushing non-decreasing ranks; violations
// are reported as NonMonotoneRank and FIFO order inside the rank store
// wins.
template <typename Meta = std::uint32_t>
class HwBlock {
 public:
  struct Config {
    std::size_t max_flows = 1024;            // flow-scheduler entries (up to 2048)
    std::size_t rank_store_capacity = 65536;
    unsigned rank_bits = 16;
  };

  struct Element {
    FlowId flow = 0;
    LogicalPifoId lp = 0;
    Rank rank = 0;
    Meta metadata{};
    std::uint64_t seq = 0;
  };

  explicit HwBlock(Config cfg = {}) : cfg_(cfg) {
    if (cfg_.max_flows > 2048)
      throw Error(ErrorCode::InvalidSpec, "flow scheduler is limited to 2048 entries");
    rank_mask_ = cfg_.rank_bits >= 64 ? ~Rank{0} : ((Rank{1} << cfg_.rank_bits) - 1);
  }

  Tick now() const { return now_; }

  void hw_cycle() {
    ++now_;
    issued_.erase(issued_.begin(), issued_.lower_bound(now_));
    externals_this_cycle_.erase(externals_this_cycle_.begin(),
                                externals_this_cycle_.lower_bound(now_));
    pops_this_cycle_.erase(pops_this_cycle_.begin(), pops_this_cycle_.lower_bound(now_));
  }

  void hw_enqueue(FlowId flow, LogicalPifoId lp, Rank rank, Meta metadata) {
    if (++externals_this_cycle_[now_] > 1)
      throw Error(ErrorCode::InvalidSpec, "one external enqueue per cycle");
    rank &= rank_mask_;
    if (!fs_.empty()) {
      Rank mn = fs_.front().rank;
      Rank dist = rank > mn ? rank - mn : mn - rank;
      if (cfg_.rank_bits < 64 && dist >= (Rank{1} << (cfg_.rank_bits - 1)))
        events_.push_back({now_, EventKind::WrapHazard,
                           "rank " + std::to_string(rank) + " is >= half the rank range from "
                               "current minimum " + std::to_string(mn)});
    }
    Key key{flow, lp};
    auto lr = last_rank_.find(key);
    if (lr != last_rank_.end() && rank < lr->second)
      events_.push_back({now_, EventKind::NonMonotoneRank,
                         "flow " + std::to_string(flow) + " rank " + std::to_string(rank) +
                             " below its previous rank " + std::to_string(lr->second)});
    if (in_fs_.count(key)) {
      if (store_count_ == cfg_.rank_store_capacity)
        throw Error(ErrorCode::RankStoreFull, "rank store at capacity");
      store_[key].push_back({rank, metadata, seq_});
      ++store_count_;
    } else {
      if (in_fs_.size() == cfg_.max_flows)
        throw Error(ErrorCode::FlowTableFull, "flow scheduler at capacity");
      Tick t = book_external(now_);
      insert_fs({rank, seq_, flow, lp, metadata, t + 2, t, false});
      in_fs_.insert(key);
    }
    last_rank_[key] = rank;
    ++seq_;
  }

  Element hw_dequeue(LogicalPifoId lp) {
    auto last = last_deq_.find(lp);
    if (last != last_deq_.end() && now_ - last->second < 3)
      throw Error(ErrorCode::DequeueTooSoon,
                  "logical pifo " + std::to_string(lp) + " was dequeued " +
                      std::to_string(now_ - last->second) + " cycles ago; minimum is 3");
    auto it = std::find_if(fs_.begin(), fs_.end(), [&](const FsEntry& e) {
      return e.lp == lp && e.visible_at <= now_;
    });
    if (it == fs_.end())
      throw Error(ErrorCode::EmptyLogicalPifo,
                  "logical pifo " + std::to_string(lp) + " has no poppable element");
    if (++pops_this_cycle_[now_] > 1)
      throw Error(ErrorCode::InvalidSpec, "one pop per cycle");

    Element out{it->flow, it->lp, it->rank, it->metadata, it->seq};
    Key key{it->flow, it->lp};
    fs_.erase(it);
    auto q = store_.find(key);
    if (q != store_.end() && !q->second.empty()) {
      StoreEntry head = q->second.front();
      q->second.pop_front();
      --store_count_;
      if (q->second.empty()) store_.erase(q);
      Tick t = book_reinsert(now_ + 1);
      insert_fs({head.rank, head.seq, key.first, key.second, head.metadata, t + 2, t, true});
    } else {
      in_fs_.erase(key);
      last_rank_.erase(key);
    }
    last_deq_[lp] = now_;
    return out;
  }

  std::size_t flow_scheduler_occupancy() const { return fs_.size(); }
  std::size_t rank_store_occupancy() const { return store_count_; }
  std::size_t size() const { return fs_.size() + store_count_; }
  const std::vector<EventRecord>& events() const { return events_; }

 private:
  using Key = std::pair<FlowId, LogicalPifoId>;

  struct FsEntry {
    Rank rank = 0;
    std::uint64_t seq = 0;
    FlowId flow = 0;
    LogicalPifoId lp = 0;
    Meta metadata{};
    Tick visible_at = 0;
    Tick issue_tick = 0;
    bool reinsert = false;
  };

  struct StoreEntry {
    Rank rank = 0;
    Meta metadata{};
    std::uint64_t seq = 0;
  };

  void insert_fs(FsEntry e) {
    auto pos = std::upper_bound(fs_.begin(), fs_.end(), e, [](const FsEntry& a, const FsEntry& b) {
      return std::tie(a.rank, a.seq) < std::tie(b.rank, b.seq);
    });
    fs_.insert(pos, std::move(e));
  }

  Tick book_external(Tick t) {
    while (issued_[t] >= 2) ++t;
    ++issued_[t];
    return t;
  }

  // A reinsert always gets its slot; if the cycle already carries two
  // pushes the newest external one stalls a cycle.
  Tick book_reinsert(Tick t) {
    if (issued_[t] >= 2) {
      FsEntry* bump = nullptr;
      for (auto& e : fs_)
        if (!e.reinsert && e.issue_tick == t && (!bump || e.seq > bump->seq)) bump = &e;
      if (bump) {
        --issued_[t];
        Tick nt = book_external(t + 1);
        bump->issue_tick = nt;
        bump->visible_at = nt + 2;
      }
    }
    ++issued_[t];
    return t;
  }

  Config cfg_;
  Rank rank_mask_ = 0;
  Tick now_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<FsEntry> fs_;  // sorted by (rank, seq)
  std::set<Key> in_fs_;
  std::map<Key, std::deque<StoreEntry>> store_;
  std::size_t store_count_ = 0;
  std::map<Key, Rank> last_rank_;
  std::map<LogicalPifoId, Tick> last_deq_;
  std::map<Tick, int> issued_;
  std::map<Tick, int> externals_this_cycle_;
  std::map<Tick, int> pops_this_cycle_;
  std::vector<EventRecord> events_;
};

}  // namespace pifo::hw
