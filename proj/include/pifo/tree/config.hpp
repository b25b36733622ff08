#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pifo/errors.hpp"
#include "pifo/tree/tree.hpp"
#include "pifo/txn/builtins.hpp"

namespace pifo::tree {

// Text format for scheduling trees. Line oriented; '#' starts a
// comment. Directives:
//
//   node <name>                 starts a node; attribute lines follow
//     parent <name>
//     weight <int>
//     predicate <expr>          boolean expression over packet fields
//     sched <txn> [k=v ...]     transaction name (builtin or inline)
//     shaping <txn> [k=v ...]
//   flow <id> [weight <w>]      declares one flow of the domain
//   flows <lo>..<hi> [weight <w>]
//   transaction <name> ... { }  inline transaction (multi-line)
//
namespace config_detail {

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ": " + msg);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::int64_t parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(s, &used);
    if (used != s.size()) fail(line, "bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(line, "bad integer '" + s + "'");
  }
}

inline std::map<std::string, std::int64_t> parse_kv(const std::vector<std::string>& toks,
                                                    std::size_t from, int line) {
  std::map<std::string, std::int64_t> kv;
  for (std::size_t i = from; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos) fail(line, "expected key=value, got '" + toks[i] + "'");
    kv[toks[i].substr(0, eq)] = parse_int(toks[i].substr(eq + 1), line);
  }
  return kv;
}

}  // namespace config_detail

struct TreeConfig {
  std::vector<SchedNode> nodes;
  std::vector<FlowSpec> flows;
};

inline TreeConfig parse_tree_config(const std::string& text) {
  using namespace config_detail;

  // Pass 1: extract inline transaction blocks and plain lines.
  std::map<std::string, std::shared_ptr<const txn::TransactionProgram>> inline_txns;
  std::vector<std::pair<int, std::string>> lines;  // (line number, content)
  {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      auto toks = split_ws(raw);
      if (toks.empty()) continue;
      if (toks[0] == "transaction") {
        int start = lineno;
        std::string block = raw;
        long depth = 0;
        for (char c : raw) depth += (c == '{') - (c == '}');
        while (depth > 0 || block.find('{') == std::string::npos) {
          if (!std::getline(in, raw)) fail(start, "unterminated transaction block");
          ++lineno;
          auto h = raw.find('#');
          if (h != std::string::npos) raw.erase(h);
          block += "\n" + raw;
          for (char c : raw) depth += (c == '{') - (c == '}');
          if (depth == 0 && block.find('{') != std::string::npos) break;
        }
        auto prog = std::make_shared<txn::TransactionProgram>(txn::parse_transaction(block));
        inline_txns[prog->name] = prog;
        continue;
      }
      lines.emplace_back(lineno, raw);
    }
  }

  auto resolve_txn = [&](const std::string& name,
                         int line) -> std::shared_ptr<const txn::TransactionProgram> {
    auto it = inline_txns.find(name);
    if (it != inline_txns.end()) return it->second;
    try {
      return std::make_shared<txn::TransactionProgram>(txn::builtin(name));
    } catch (const Error&) {
      fail(line, "unknown transaction '" + name + "'");
    }
  };

  // Pass 2a: node names.
  TreeConfig cfg;
  std::map<std::string, NodeId> name_to_id;
  for (const auto& [lineno, raw] : lines) {
    auto toks = split_ws(raw);
    if (toks[0] != "node") continue;
    if (toks.size() != 2) fail(lineno, "usage: node <name>");
    if (name_to_id.count(toks[1])) fail(lineno, "duplicate node '" + toks[1] + "'");
    NodeId id = static_cast<NodeId>(cfg.nodes.size());
    name_to_id[toks[1]] = id;
    SchedNode n;
    n.id = id;
    n.name = toks[1];
    cfg.nodes.push_back(std::move(n));
  }

  // Pass 2b: attributes and flows.
  SchedNode* cur = nullptr;
  for (const auto& [lineno, raw] : lines) {
    auto toks = split_ws(raw);
    const std::string& kw = toks[0];
    if (kw == "node") {
      cur = &cfg.nodes[name_to_id.at(toks[1])];
    } else if (kw == "flow") {
      if (toks.size() != 2 && toks.size() != 4) fail(lineno, "usage: flow <id> [weight <w>]");
      FlowSpec f;
      f.id = parse_int(toks[1], lineno);
      if (toks.size() == 4) {
        if (toks[2] != "weight") fail(lineno, "expected 'weight'");
        f.weight = parse_int(toks[3], lineno);
      }
      cfg.flows.push_back(f);
    } else if (kw == "flows") {
      if (toks.size() != 2 && toks.size() != 4) fail(lineno, "usage: flows <lo>..<hi> [weight <w>]");
      auto dots = toks[1].find("..");
      if (dots == std::string::npos) fail(lineno, "expected <lo>..<hi>");
      std::int64_t lo = parse_int(toks[1].substr(0, dots), lineno);
      std::int64_t hi = parse_int(toks[1].substr(dots + 2), lineno);
      std::int64_t w = 1;
      if (toks.size() == 4) w = parse_int(toks[3], lineno);
      for (std::int64_t f = lo; f <= hi; ++f) cfg.flows.push_back({f, w});
    } else if (kw == "parent") {
      if (!cur) fail(lineno, "'parent' outside a node");
      auto it = name_to_id.find(toks.at(1));
      if (it == name_to_id.end()) fail(lineno, "unknown parent '" + toks[1] + "'");
      cur->parent = it->second;
    } else if (kw == "weight") {
      if (!cur) fail(lineno, "'weight' outside a node");
      cur->weight = parse_int(toks.at(1), lineno);
    } else if (kw == "predicate") {
      if (!cur) fail(lineno, "'predicate' outside a node");
      std::string expr = raw.substr(raw.find("predicate") + 9);
      try {
        cur->predicate = txn::parse_expression(expr);
      } catch (const Error& e) {
        fail(lineno, std::string("bad predicate: ") + e.what());
      }
      cur->predicate_src = expr;
    } else if (kw == "sched") {
      if (!cur) fail(lineno, "'sched' outside a node");
      cur->sched_txn = resolve_txn(toks.at(1), lineno);
      cur->sched_params = parse_kv(toks, 2, lineno);
    } else if (kw == "shaping") {
      if (!cur) fail(lineno, "'shaping' outside a node");
      cur->shaping_txn = resolve_txn(toks.at(1), lineno);
      if (cur->shaping_txn->kind != txn::TxnKind::Shaping)
        fail(lineno, "'" + toks[1] + "' is not a shaping transaction");
      cur->shaping_params = parse_kv(toks, 2, lineno);
    } else {
      fail(lineno, "unknown directive '" + kw + "'");
    }
  }

  for (const auto& n : cfg.nodes)
    if (!n.sched_txn)
      throw Error(ErrorCode::SemanticError, "node '" + n.name + "' has no scheduling transaction");
  return cfg;
}

inline ValidatedTree load_tree_config_text(const std::string& text) {
  TreeConfig cfg = parse_tree_config(text);
  return validate_tree(std::move(cfg.nodes), cfg.flows);
}

inline ValidatedTree load_tree_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_tree_config_text(buf.str());
}

}  // namespace pifo::tree
