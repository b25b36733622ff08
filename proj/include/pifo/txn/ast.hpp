#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace pifo::txn {

enum class BinOp { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

enum class ExprKind {
  IntLit,      // literal integer
  Now,         // wall-clock tick
  PacketField, // p.<name>
  Var,         // bare identifier: state scalar or param
  MapRef,      // <name>[f]
  FlowWeight,  // f.weight
  Contains,    // f in <name>
  Binary,
  Min,
  Max,
  Floor,
};

struct Expr {
  ExprKind kind;
  std::int64_t int_value = 0;
  std::string name;  // field / var / map name
  BinOp op = BinOp::Add;
  std::unique_ptr<Expr> lhs, rhs;
};

using ExprPtr = std::unique_ptr<Expr>;

enum class LValueKind { Var, MapEntry, PacketField };

struct LValue {
  LValueKind kind;
  std::string name;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class StmtKind { Assign, If };

struct Stmt {
  StmtKind kind;
  // Assign
  LValue lvalue;
  ExprPtr expr;
  // If
  ExprPtr cond;
  std::vector<StmtPtr> then_branch;
  std::vector<StmtPtr> else_branch;
};

enum class TxnKind { Scheduling, Shaping };

struct StateDecl {
  std::string name;
  std::int64_t init = 0;
  std::string init_param;  // non-empty: initialize from this param's value
};

// A parsed scheduling or shaping transaction.
struct TransactionProgram {
  std::string name;
  TxnKind kind = TxnKind::Scheduling;
  std::map<std::string, std::int64_t> params;  // defaults, overridable per node
  std::vector<StateDecl> state_decls;
  std::vector<std::string> statemaps;
  std::vector<StmtPtr> body;
  std::vector<StmtPtr> on_dequeue;  // optional dequeue hook

  bool has_param(const std::string& n) const { return params.count(n) != 0; }
};

}  // namespace pifo::txn
