#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pifo/errors.hpp"
#include "pifo/fixed.hpp"
#include "pifo/packet.hpp"
#include "pifo/txn/ast.hpp"

namespace pifo::txn {

// Mutable per-node transaction state. Values are Q47.16 fixed point.
struct TxnState {
  std::map<std::string, fx> scalars;
  std::map<std::string, std::map<FlowId, fx>> flow_maps;

  // Descaled views, mostly for tests and debugging.
  std::int64_t scalar(const std::string& name) const {
    auto it = scalars.find(name);
    return it == scalars.end() ? 0 : fx_floor(it->second);
  }
  std::int64_t flow_value(const std::string& map, FlowId f) const {
    auto it = flow_maps.find(map);
    if (it == flow_maps.end()) return 0;
    auto jt = it->second.find(f);
    return jt == it->second.end() ? 0 : fx_floor(jt->second);
  }
};

// Initializes state from the program's declarations, resolving
// init-from-param declarations against the effective params.
inline TxnState init_state(const TransactionProgram& prog,
                           const std::map<std::string, fx>& params) {
  TxnState st;
  for (const auto& d : prog.state_decls) {
    if (!d.init_param.empty()) {
      st.scalars[d.name] = params.at(d.init_param);
    } else {
      st.scalars[d.name] = to_fx(d.init);
    }
  }
  for (const auto& m : prog.statemaps) st.flow_maps[m];
  return st;
}

inline std::map<std::string, fx> scale_params(
    const TransactionProgram& prog,
    const std::map<std::string, std::int64_t>& overrides = {}) {
  std::map<std::string, fx> out;
  for (const auto& [k, v] : prog.params) out[k] = to_fx(v);
  for (const auto& [k, v] : overrides) out[k] = to_fx(v);
  return out;
}

// Fixed-point field values the transaction saw and wrote for one
// packet; kept alongside PIFO elements so dequeue hooks (e.g. STFQ's
// virtual_time update) can read them later at full precision.
using FieldSnapshot = std::map<std::string, fx>;

struct ExecResult {
  fx rank_fx = 0;       // exact fixed-point rank
  Rank rank = 0;        // descaled (floor for scheduling, ceil for shaping)
  FieldSnapshot fields; // packet-field values after execution
};

namespace detail {

// Undo log so a failed execution leaves state untouched.
struct Journal {
  std::vector<std::pair<std::string, std::optional<fx>>> scalars;
  std::vector<std::tuple<std::string, FlowId, std::optional<fx>>> map_entries;

  void rollback(TxnState& st) const {
    for (auto it = map_entries.rbegin(); it != map_entries.rend(); ++it) {
      const auto& [name, f, old] = *it;
      if (old)
        st.flow_maps[name][f] = *old;
      else
        st.flow_maps[name].erase(f);
    }
    for (auto it = scalars.rbegin(); it != scalars.rend(); ++it) {
      if (it->second)
        st.scalars[it->first] = *it->second;
      else
        st.scalars.erase(it->first);
    }
  }
};

struct EvalCtx {
  TxnState* state = nullptr;
  const std::map<std::string, fx>* params = nullptr;
  const PacketRecord* pkt = nullptr;
  FieldSnapshot* fields = nullptr;  // working packet-field values (fx)
  fx now = 0;
  fx weight = kFxOne;
  FlowId flow = 0;
  Journal* journal = nullptr;
  bool predicate_mode = false;  // bare idents resolve to packet fields
};

inline fx read_packet_field(const EvalCtx& ctx, const std::string& name) {
  if (ctx.fields) {
    auto it = ctx.fields->find(name);
    if (it != ctx.fields->end()) return it->second;
  }
  if (name == "length") return to_fx(ctx.pkt->length);
  if (name == "size") return to_fx(ctx.pkt->length);  // alias unless overridden above
  if (name == "flow_id") return to_fx(ctx.pkt->flow_id);
  return to_fx(ctx.pkt->field(name, 0));
}

inline fx eval(const Expr& e, EvalCtx& ctx);

inline fx eval_binary(const Expr& e, EvalCtx& ctx) {
  if (e.op == BinOp::And) return (eval(*e.lhs, ctx) != 0 && eval(*e.rhs, ctx) != 0) ? kFxOne : 0;
  if (e.op == BinOp::Or) return (eval(*e.lhs, ctx) != 0 || eval(*e.rhs, ctx) != 0) ? kFxOne : 0;
  fx a = eval(*e.lhs, ctx);
  fx b = eval(*e.rhs, ctx);
  switch (e.op) {
    case BinOp::Add: return a + b;
    case BinOp::Sub: return a - b;
    case BinOp::Mul: return fx_mul(a, b);
    case BinOp::Div:
      if (b == 0) throw Error(ErrorCode::ArithmeticError, "division by zero");
      return fx_div(a, b);
    case BinOp::Lt: return a < b ? kFxOne : 0;
    case BinOp::Le: return a <= b ? kFxOne : 0;
    case BinOp::Gt: return a > b ? kFxOne : 0;
    case BinOp::Ge: return a >= b ? kFxOne : 0;
    case BinOp::Eq: return a == b ? kFxOne : 0;
    case BinOp::Ne: return a != b ? kFxOne : 0;
    default: return 0;
  }
}

inline fx eval(const Expr& e, EvalCtx& ctx) {
  switch (e.kind) {
    case ExprKind::IntLit: return to_fx(e.int_value);
    case ExprKind::Now: return ctx.now;
    case ExprKind::PacketField: return read_packet_field(ctx, e.name);
    case ExprKind::Var: {
      if (ctx.predicate_mode) return read_packet_field(ctx, e.name);
      if (ctx.params) {
        auto it = ctx.params->find(e.name);
        if (it != ctx.params->end()) return it->second;
      }
      auto it = ctx.state->scalars.find(e.name);
      return it == ctx.state->scalars.end() ? 0 : it->second;
    }
    case ExprKind::MapRef: {
      auto& m = ctx.state->flow_maps[e.name];
      auto it = m.find(ctx.flow);
      return it == m.end() ? 0 : it->second;
    }
    case ExprKind::FlowWeight: return ctx.weight;
    case ExprKind::Contains: {
      auto& m = ctx.state->flow_maps[e.name];
      return m.count(ctx.flow) ? kFxOne : 0;
    }
    case ExprKind::Binary: return eval_binary(e, ctx);
    case ExprKind::Min: return std::min(eval(*e.lhs, ctx), eval(*e.rhs, ctx));
    case ExprKind::Max: return std::max(eval(*e.lhs, ctx), eval(*e.rhs, ctx));
    case ExprKind::Floor: return fx_trunc(eval(*e.lhs, ctx));
  }
  return 0;
}

inline void exec_stmts(const std::vector<StmtPtr>& stmts, EvalCtx& ctx) {
  for (const auto& s : stmts) {
    if (s->kind == StmtKind::If) {
      if (eval(*s->cond, ctx) != 0)
        exec_stmts(s->then_branch, ctx);
      else
        exec_stmts(s->else_branch, ctx);
      continue;
    }
    fx value = eval(*s->expr, ctx);
    switch (s->lvalue.kind) {
      case LValueKind::Var: {
        auto it = ctx.state->scalars.find(s->lvalue.name);
        if (ctx.journal)
          ctx.journal->scalars.emplace_back(
              s->lvalue.name,
              it == ctx.state->scalars.end() ? std::nullopt : std::optional<fx>(it->second));
        ctx.state->scalars[s->lvalue.name] = value;
        break;
      }
      case LValueKind::MapEntry: {
        auto& m = ctx.state->flow_maps[s->lvalue.name];
        auto it = m.find(ctx.flow);
        if (ctx.journal)
          ctx.journal->map_entries.emplace_back(
              s->lvalue.name, ctx.flow,
              it == m.end() ? std::nullopt : std::optional<fx>(it->second));
        m[ctx.flow] = value;
        break;
      }
      case LValueKind::PacketField:
        (*ctx.fields)[s->lvalue.name] = value;
        break;
    }
  }
}

}  // namespace detail

// Executes a transaction for one packet. All-or-nothing: on error the
// state is rolled back and the error rethrown. Scheduling ranks are
// floored to ticks/rank units; shaping ranks (wall-clock release
// times) are rounded up so an element is never released early.
inline ExecResult execute_transaction(const TransactionProgram& prog, TxnState& state,
                                      const PacketRecord& pkt, Tick now,
                                      const std::map<std::string, fx>& params,
                                      fx weight = kFxOne,
                                      std::optional<FlowId> flow_override = {}) {
  detail::Journal journal;
  detail::EvalCtx ctx;
  ExecResult result;
  ctx.state = &state;
  ctx.params = &params;
  ctx.pkt = &pkt;
  ctx.fields = &result.fields;
  ctx.now = to_fx(now);
  ctx.weight = weight;
  ctx.flow = flow_override.value_or(pkt.flow_id);
  ctx.journal = &journal;
  try {
    detail::exec_stmts(prog.body, ctx);
  } catch (...) {
    journal.rollback(state);
    throw;
  }
  result.rank_fx = result.fields.at("rank");
  fx r = std::max<fx>(result.rank_fx, 0);
  result.rank = static_cast<Rank>(prog.kind == TxnKind::Shaping ? fx_ceil(r) : fx_floor(r));
  return result;
}

// Runs a transaction's on_dequeue hook against the field snapshot
// captured when the element was enqueued.
inline void execute_dequeue_hook(const TransactionProgram& prog, TxnState& state,
                                 const FieldSnapshot& snapshot, Tick now,
                                 const std::map<std::string, fx>& params,
                                 FlowId flow = 0) {
  if (prog.on_dequeue.empty()) return;
  PacketRecord dummy;
  FieldSnapshot fields = snapshot;
  detail::EvalCtx ctx;
  ctx.state = &state;
  ctx.params = &params;
  ctx.pkt = &dummy;
  ctx.fields = &fields;
  ctx.now = to_fx(now);
  ctx.flow = flow;
  detail::exec_stmts(prog.on_dequeue, ctx);
}

// Evaluates a predicate expression against a packet; bare identifiers
// name packet fields.
inline bool eval_predicate(const Expr& pred, const PacketRecord& pkt) {
  detail::EvalCtx ctx;
  TxnState dummy_state;
  FieldSnapshot fields;
  ctx.state = &dummy_state;
  ctx.pkt = &pkt;
  ctx.fields = &fields;
  ctx.predicate_mode = true;
  return detail::eval(pred, ctx) != 0;
}

}  // namespace pifo::txn
