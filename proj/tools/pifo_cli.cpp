#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "pifo/hw/flow_scheduler.hpp"
#include "pifo/mesh/compiler.hpp"
#include "pifo/mesh/sim.hpp"
#include "pifo/stats.hpp"
#include "pifo/trace.hpp"
#include "pifo/tree/config.hpp"
#include "pifo/tree/run.hpp"

namespace {

using namespace pifo;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw Error(ErrorCode::IoError, "cannot open output file " + path);
  return f;
}

// Replays a single-level tree through the micro-architectural block
// model: ranks still come from the node's transaction, but enqueues,
// dequeues and reinserts honor the pipeline (2-cycle push visibility,
// 3-cycle same-pifo dequeue spacing).
RunResult run_hw(const tree::ValidatedTree& tree, const std::vector<TraceRecord>& trace,
                 std::int64_t line_rate, Tick horizon) {
  if (tree.nodes.size() != 1)
    throw Error(ErrorCode::InvalidSpec,
                "hw mode models one physical block and supports single-level trees; "
                "use --mode mesh for hierarchies");
  const tree::SchedNode& nd = tree.node(tree.root);
  auto params = txn::scale_params(*nd.sched_txn, nd.sched_params);
  auto state = txn::init_state(*nd.sched_txn, params);
  std::map<std::uint64_t, txn::FieldSnapshot> hook_snaps;

  hw::HwBlock<std::uint64_t> block({.max_flows = 1024, .rank_store_capacity = 65536,
                                    .rank_bits = 32});
  const LogicalPifoId lp = nd.sched_pifo;

  RunResult out;
  std::size_t next = 0;
  Tick busy_until = 0;
  std::size_t in_flight = 0;
  while (block.now() < horizon) {
    Tick now = block.now();
    if (next < trace.size() && trace[next].arrival_tick == now) {
      const TraceRecord& pkt = trace[next];
      auto res = txn::execute_transaction(*nd.sched_txn, state, pkt, now, params,
                                          to_fx(tree.flow_weight(pkt.flow_id)), pkt.flow_id);
      block.hw_enqueue(pkt.flow_id, lp, res.rank, next);
      if (!nd.sched_txn->on_dequeue.empty()) hook_snaps[next] = std::move(res.fields);
      ++in_flight;
      ++next;
    }
    if (now >= busy_until && in_flight > 0) {
      try {
        auto e = block.hw_dequeue(lp);
        const TraceRecord& pkt = trace[e.metadata];
        auto snap = hook_snaps.find(e.metadata);
        if (snap != hook_snaps.end()) {
          txn::execute_dequeue_hook(*nd.sched_txn, state, snap->second, now, params,
                                    pkt.flow_id);
          hook_snaps.erase(snap);
        }
        out.log.push_back({pkt.packet_id, pkt.flow_id, pkt.arrival_tick, now, pkt.length});
        Tick tx = (pkt.length + line_rate - 1) / line_rate;
        busy_until = now + std::max<Tick>(tx, 1);
        --in_flight;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyLogicalPifo && e.code() != ErrorCode::DequeueTooSoon)
          throw;  // element not yet visible / pipeline spacing: wait a cycle
      }
    }
    block.hw_cycle();
    if (next == trace.size() && in_flight == 0) break;
  }
  out.horizon_exceeded = in_flight > 0 || next < trace.size();
  out.events = block.events();
  return out;
}

int do_validate(const std::string& tree_path) {
  auto tree = tree::load_tree_config(tree_path);
  std::cout << "ok: " << tree.nodes.size() << " node(s), " << tree.flow_weights.size()
            << " flow(s), " << tree.num_shaping_nodes() << " shaping stage(s)\n";
  return kExitOk;
}

int do_compile(const std::string& tree_path, std::size_t max_blocks, const std::string& out_path) {
  auto tree = tree::load_tree_config(tree_path);
  auto cfg = mesh::compile(tree, max_blocks);
  auto diags = mesh::check_config(cfg);
  auto file = open_out(out_path);
  (file ? *file : std::cout) << mesh::to_text(cfg);
  for (const auto& d : diags) std::cerr << d.code << ": " << d.message << "\n";
  return diags.empty() ? kExitOk : kExitDiagnostics;
}

int do_run(const std::string& tree_path, const std::string& trace_path, const std::string& mode,
           std::int64_t line_rate, Tick horizon, Tick stats_window,
           const std::string& out_path) {
  auto tree = tree::load_tree_config(tree_path);
  auto trace = read_trace_file(trace_path);

  RunResult res;
  if (mode == "behavioral") {
    res = tree::run_behavioral(tree, trace, line_rate, horizon);
  } else if (mode == "mesh") {
    auto cfg = mesh::compile(tree);
    res = mesh::run_mesh(tree, cfg, trace, line_rate, horizon);
  } else if (mode == "hw") {
    res = run_hw(tree, trace, line_rate, horizon);
  } else {
    throw Error(ErrorCode::InvalidSpec, "unknown mode '" + mode + "'");
  }

  auto file = open_out(out_path);
  write_log(file ? *file : std::cout, res.log);

  auto rep = compute_stats(res.log, stats_window);
  write_stats(std::cerr, rep);
  std::cerr << "# departed=" << res.log.size() << " drops=" << res.drops
            << " max_deferral=" << res.max_deferral
            << " horizon_exceeded=" << (res.horizon_exceeded ? 1 : 0) << "\n";
  for (const auto& e : res.events)
    std::cerr << "event tick=" << e.tick << " " << to_string(e.kind) << ": " << e.detail << "\n";
  return kExitOk;
}

int do_gen(const GenSpec& spec, const std::string& out_path) {
  auto trace = generate_trace(spec);
  auto file = open_out(out_path);
  write_trace(file ? *file : std::cout, trace);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PIFO scheduling toolkit: validate and compile scheduling trees, replay traces"};
  app.require_subcommand(1);

  std::string tree_path, trace_path, out_path;
  std::string mode = "behavioral";
  std::int64_t line_rate = 100;
  pifo::Tick horizon = 1'000'000;
  pifo::Tick stats_window = 1000;
  std::size_t max_blocks = 5;
  pifo::GenSpec gen;
  gen.kind = "backlogged";

  auto* validate = app.add_subcommand("validate", "parse and validate a tree config");
  validate->add_option("tree", tree_path, "tree config file")->required();

  auto* compile = app.add_subcommand("compile", "compile a tree to a mesh config");
  compile->add_option("tree", tree_path, "tree config file")->required();
  compile->add_option("--max-blocks", max_blocks, "physical blocks available");
  compile->add_option("--out", out_path, "write the config here instead of stdout");

  auto* run = app.add_subcommand("run", "replay a trace through a tree");
  run->add_option("tree", tree_path, "tree config file")->required();
  run->add_option("trace", trace_path, "trace CSV file")->required();
  run->add_option("--mode", mode, "behavioral | mesh | hw")
      ->check(CLI::IsMember({"behavioral", "mesh", "hw"}));
  run->add_option("--line-rate", line_rate, "output link rate in bytes per tick");
  run->add_option("--horizon", horizon, "maximum simulated ticks");
  run->add_option("--stats-window", stats_window, "throughput window in ticks");
  run->add_option("--out", out_path, "write the departure log here instead of stdout");

  auto* g = app.add_subcommand("gen", "generate a trace");
  g->add_option("--kind", gen.kind, "backlogged | poisson | onoff");
  g->add_option("--flows", gen.flows, "number of flows");
  g->add_option("--len", gen.length, "packet length in bytes");
  g->add_option("--count", gen.count, "packets to emit");
  g->add_option("--rate", gen.rate, "poisson arrivals per tick per flow");
  g->add_option("--burst", gen.burst, "onoff packets per burst");
  g->add_option("--idle", gen.idle, "onoff idle ticks between bursts");
  g->add_option("--seed", gen.seed, "rng seed");
  g->add_option("--out", out_path, "write the trace here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return do_validate(tree_path);
    if (compile->parsed()) return do_compile(tree_path, max_blocks, out_path);
    if (run->parsed())
      return do_run(tree_path, trace_path, mode, line_rate, horizon, stats_window, out_path);
    if (g->parsed()) return do_gen(gen, out_path);
  } catch (const pifo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == pifo::ErrorCode::IoError ? kExitIo : kExitDiagnostics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiagnostics;
  }
  return kExitOk;
}
