#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pifo/errors.hpp"
#include "pifo/txn/ast.hpp"

namespace pifo::txn {

namespace detail {

enum class TokKind { Ident, Int, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws_and_comments();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = TokKind::End;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      tok_.kind = TokKind::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump();
      tok_.kind = TokKind::Int;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      tok_.value = std::stoll(tok_.text);
      return;
    }
    // two-char operators first
    static const char* two_char[] = {"<=", ">=", "==", "!=", "&&", "||"};
    for (const char* op : two_char) {
      if (src_.substr(pos_, 2) == op) {
        tok_.kind = TokKind::Punct;
        tok_.text = op;
        bump();
        bump();
        return;
      }
    }
    tok_.kind = TokKind::Punct;
    tok_.text = std::string(1, c);
    bump();
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

[[noreturn]] inline void syntax_error(const Token& t, const std::string& msg) {
  throw Error(ErrorCode::SyntaxError, "line " + std::to_string(t.line) + ", col " +
                                          std::to_string(t.col) + ": " + msg);
}

[[noreturn]] inline void semantic_error(const std::string& msg) {
  throw Error(ErrorCode::SemanticError, msg);
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  TransactionProgram parse_program() {
    expect_ident("transaction");
    TransactionProgram prog;
    prog.name = expect_any_ident("transaction name");
    std::string kind = expect_any_ident("'scheduling' or 'shaping'");
    if (kind == "scheduling")
      prog.kind = TxnKind::Scheduling;
    else if (kind == "shaping")
      prog.kind = TxnKind::Shaping;
    else
      syntax_error(lex_.peek(), "expected 'scheduling' or 'shaping', got '" + kind + "'");
    expect_punct("{");
    parse_decls(prog);
    while (!at_punct("}")) {
      if (at_ident("on_dequeue")) {
        lex_.next();
        prog.on_dequeue.push_back(parse_statement());
        continue;
      }
      prog.body.push_back(parse_statement());
    }
    expect_punct("}");
    return prog;
  }

  ExprPtr parse_bare_expression() {
    ExprPtr e = parse_expr();
    if (lex_.peek().kind != TokKind::End)
      syntax_error(lex_.peek(), "trailing input after expression");
    return e;
  }

 private:
  void parse_decls(TransactionProgram& prog) {
    for (;;) {
      if (at_ident("state")) {
        lex_.next();
        StateDecl d;
        d.name = expect_any_ident("state name");
        expect_punct("=");
        if (lex_.peek().kind == TokKind::Ident) {
          d.init_param = lex_.next().text;
        } else {
          d.init = parse_int_literal();
        }
        eat_punct(";");
        prog.state_decls.push_back(std::move(d));
      } else if (at_ident("statemap")) {
        lex_.next();
        prog.statemaps.push_back(expect_any_ident("statemap name"));
        eat_punct(";");
      } else if (at_ident("param")) {
        lex_.next();
        std::string name = expect_any_ident("param name");
        expect_punct("=");
        prog.params[name] = parse_int_literal();
        eat_punct(";");
      } else {
        return;
      }
    }
  }

  std::int64_t parse_int_literal() {
    bool neg = false;
    if (at_punct("-")) {
      lex_.next();
      neg = true;
    }
    if (lex_.peek().kind != TokKind::Int)
      syntax_error(lex_.peek(), "expected integer literal");
    std::int64_t v = lex_.next().value;
    return neg ? -v : v;
  }

  StmtPtr parse_statement() {
    if (at_ident("if")) return parse_if();
    auto stmt = std::make_unique<Stmt>();
    stmt->kind = StmtKind::Assign;
    stmt->lvalue = parse_lvalue();
    expect_punct("=");
    stmt->expr = parse_expr();
    expect_punct(";");
    return stmt;
  }

  StmtPtr parse_if() {
    expect_ident("if");
    auto stmt = std::make_unique<Stmt>();
    stmt->kind = StmtKind::If;
    expect_punct("(");
    stmt->cond = parse_expr();
    expect_punct(")");
    stmt->then_branch = parse_block();
    if (at_ident("else")) {
      lex_.next();
      stmt->else_branch = parse_block();
    }
    return stmt;
  }

  std::vector<StmtPtr> parse_block() {
    std::vector<StmtPtr> stmts;
    expect_punct("{");
    while (!at_punct("}")) stmts.push_back(parse_statement());
    expect_punct("}");
    return stmts;
  }

  LValue parse_lvalue() {
    if (lex_.peek().kind != TokKind::Ident)
      syntax_error(lex_.peek(), "expected lvalue");
    std::string name = lex_.next().text;
    if (name == "p" && at_punct(".")) {
      lex_.next();
      return LValue{LValueKind::PacketField, expect_any_ident("packet field")};
    }
    if (at_punct("[")) {
      lex_.next();
      expect_ident("f");
      expect_punct("]");
      return LValue{LValueKind::MapEntry, name};
    }
    return LValue{LValueKind::Var, name};
  }

  // Precedence: || < && < comparison < additive < multiplicative < unary.
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (at_punct("||")) {
      lex_.next();
      lhs = make_binary(BinOp::Or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_cmp();
    while (at_punct("&&")) {
      lex_.next();
      lhs = make_binary(BinOp::And, std::move(lhs), parse_cmp());
    }
    return lhs;
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    for (;;) {
      BinOp op;
      if (at_punct("<"))
        op = BinOp::Lt;
      else if (at_punct("<="))
        op = BinOp::Le;
      else if (at_punct(">"))
        op = BinOp::Gt;
      else if (at_punct(">="))
        op = BinOp::Ge;
      else if (at_punct("=="))
        op = BinOp::Eq;
      else if (at_punct("!="))
        op = BinOp::Ne;
      else
        return lhs;
      lex_.next();
      lhs = make_binary(op, std::move(lhs), parse_add());
    }
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    for (;;) {
      if (at_punct("+")) {
        lex_.next();
        lhs = make_binary(BinOp::Add, std::move(lhs), parse_mul());
      } else if (at_punct("-")) {
        lex_.next();
        lhs = make_binary(BinOp::Sub, std::move(lhs), parse_mul());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (at_punct("*")) {
        lex_.next();
        lhs = make_binary(BinOp::Mul, std::move(lhs), parse_unary());
      } else if (at_punct("/")) {
        lex_.next();
        lhs = make_binary(BinOp::Div, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (at_punct("-")) {
      lex_.next();
      auto zero = std::make_unique<Expr>();
      zero->kind = ExprKind::IntLit;
      zero->int_value = 0;
      return make_binary(BinOp::Sub, std::move(zero), parse_unary());
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = lex_.peek();
    if (t.kind == TokKind::Int) {
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::IntLit;
      e->int_value = lex_.next().value;
      return e;
    }
    if (t.kind == TokKind::Punct && t.text == "(") {
      lex_.next();
      ExprPtr inner = parse_expr();
      expect_punct(")");
      return inner;
    }
    if (t.kind != TokKind::Ident) syntax_error(t, "expected expression");
    std::string name = lex_.next().text;
    if (name == "now") {
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::Now;
      return e;
    }
    if (name == "min" || name == "max") {
      auto e = std::make_unique<Expr>();
      e->kind = name == "min" ? ExprKind::Min : ExprKind::Max;
      expect_punct("(");
      e->lhs = parse_expr();
      expect_punct(",");
      e->rhs = parse_expr();
      expect_punct(")");
      return e;
    }
    if (name == "floor") {
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::Floor;
      expect_punct("(");
      e->lhs = parse_expr();
      expect_punct(")");
      return e;
    }
    if (name == "p" && at_punct(".")) {
      lex_.next();
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::PacketField;
      e->name = expect_any_ident("packet field");
      return e;
    }
    if (name == "f") {
      if (at_punct(".")) {
        lex_.next();
        std::string attr = expect_any_ident("flow attribute");
        if (attr != "weight") semantic_error("unknown flow attribute 'f." + attr + "'");
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::FlowWeight;
        return e;
      }
      if (at_ident("in")) {
        lex_.next();
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Contains;
        e->name = expect_any_ident("statemap name");
        return e;
      }
    }
    if (at_punct("[")) {
      lex_.next();
      expect_ident("f");
      expect_punct("]");
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::MapRef;
      e->name = name;
      return e;
    }
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Var;
    e->name = name;
    return e;
  }

  static ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Binary;
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  bool at_punct(const std::string& p) const {
    return lex_.peek().kind == TokKind::Punct && lex_.peek().text == p;
  }
  bool at_ident(const std::string& id) const {
    return lex_.peek().kind == TokKind::Ident && lex_.peek().text == id;
  }
  void expect_punct(const std::string& p) {
    if (!at_punct(p)) syntax_error(lex_.peek(), "expected '" + p + "'");
    lex_.next();
  }
  void eat_punct(const std::string& p) {
    if (at_punct(p)) lex_.next();
  }
  void expect_ident(const std::string& id) {
    if (!at_ident(id)) syntax_error(lex_.peek(), "expected '" + id + "'");
    lex_.next();
  }
  std::string expect_any_ident(const std::string& what) {
    if (lex_.peek().kind != TokKind::Ident)
      syntax_error(lex_.peek(), "expected " + what);
    return lex_.next().text;
  }

  Lexer lex_;
};

// Static-check helpers ------------------------------------------------

struct DeclSets {
  std::set<std::string> scalars;
  std::set<std::string> maps;
  std::set<std::string> params;
};

inline void check_expr(const Expr& e, const DeclSets& d) {
  switch (e.kind) {
    case ExprKind::Var:
      if (!d.scalars.count(e.name) && !d.params.count(e.name))
        semantic_error("undeclared identifier '" + e.name + "'");
      break;
    case ExprKind::MapRef:
    case ExprKind::Contains:
      if (!d.maps.count(e.name))
        semantic_error("undeclared statemap '" + e.name + "'");
      break;
    default:
      break;
  }
  if (e.lhs) check_expr(*e.lhs, d);
  if (e.rhs) check_expr(*e.rhs, d);
}

inline void check_stmts(const std::vector<StmtPtr>& stmts, const DeclSets& d) {
  for (const auto& s : stmts) {
    if (s->kind == StmtKind::Assign) {
      switch (s->lvalue.kind) {
        case LValueKind::Var:
          if (d.params.count(s->lvalue.name))
            semantic_error("cannot assign to param '" + s->lvalue.name + "'");
          if (!d.scalars.count(s->lvalue.name))
            semantic_error("undeclared identifier '" + s->lvalue.name + "'");
          break;
        case LValueKind::MapEntry:
          if (!d.maps.count(s->lvalue.name))
            semantic_error("undeclared statemap '" + s->lvalue.name + "'");
          break;
        case LValueKind::PacketField:
          break;
      }
      check_expr(*s->expr, d);
    } else {
      check_expr(*s->cond, d);
      check_stmts(s->then_branch, d);
      check_stmts(s->else_branch, d);
    }
  }
}

// Counts assignments to p.rank along every execution path; returns
// {min, max} over paths.
inline std::pair<int, int> rank_assign_counts(const std::vector<StmtPtr>& stmts) {
  int lo = 0, hi = 0;
  for (const auto& s : stmts) {
    if (s->kind == StmtKind::Assign) {
      if (s->lvalue.kind == LValueKind::PacketField && s->lvalue.name == "rank") {
        ++lo;
        ++hi;
      }
    } else {
      auto [tl, th] = rank_assign_counts(s->then_branch);
      auto [el, eh] = rank_assign_counts(s->else_branch);
      lo += std::min(tl, el);
      hi += std::max(th, eh);
    }
  }
  return {lo, hi};
}

}  // namespace detail

// Parses a transaction and runs the static checks: identifiers must be
// declared, and every execution path must assign p.rank exactly once.
inline TransactionProgram parse_transaction(std::string_view source) {
  detail::Parser parser(source);
  TransactionProgram prog = parser.parse_program();

  detail::DeclSets decls;
  for (const auto& d : prog.state_decls) {
    decls.scalars.insert(d.name);
    if (!d.init_param.empty() && !prog.params.count(d.init_param))
      detail::semantic_error("state '" + d.name + "' initialized from undeclared param '" +
                             d.init_param + "'");
  }
  for (const auto& m : prog.statemaps) decls.maps.insert(m);
  for (const auto& [name, _] : prog.params) decls.params.insert(name);

  detail::check_stmts(prog.body, decls);
  detail::check_stmts(prog.on_dequeue, decls);
  auto [lo, hi] = detail::rank_assign_counts(prog.body);
  if (lo < 1)
    detail::semantic_error("transaction '" + prog.name +
                           "': some path does not assign p.rank");
  if (hi > 1)
    detail::semantic_error("transaction '" + prog.name +
                           "': some path assigns p.rank more than once");
  return prog;
}

// Parses a standalone boolean expression (used for node predicates).
// Bare identifiers are resolved against packet fields at evaluation
// time, so no declaration checks apply here.
inline ExprPtr parse_expression(std::string_view source) {
  detail::Parser parser(source);
  return parser.parse_bare_expression();
}

}  // namespace pifo::txn
