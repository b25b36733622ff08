#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pifo/errors.hpp"
#include "pifo/log.hpp"
#include "pifo/packet.hpp"

namespace pifo {

using TraceRecord = PacketRecord;

// Trace CSV: arrival_tick,packet_id,flow_id,length_bytes,fields
// where fields is a ;-separated list of name=value pairs (may be empty).
inline void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "arrival_tick,packet_id,flow_id,length_bytes,fields\n";
  for (const auto& p : trace) {
    out << p.arrival_tick << "," << p.packet_id << "," << p.flow_id << "," << p.length << ",";
    bool first = true;
    for (const auto& [k, v] : p.fields) {
      out << (first ? "" : ";") << k << "=" << v;
      first = false;
    }
    out << "\n";
  }
}

inline std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("arrival_tick", 0) == 0) continue;
    std::istringstream ls(line);
    TraceRecord p;
    char c;
    std::string fields;
    if (!(ls >> p.arrival_tick >> c >> p.packet_id >> c >> p.flow_id >> c >> p.length))
      throw Error(ErrorCode::IoError, "bad trace record on line " + std::to_string(lineno));
    ls >> c;  // comma before the fields column
    std::getline(ls, fields);
    std::istringstream fs(fields);
    std::string pair;
    while (std::getline(fs, pair, ';')) {
      auto eq = pair.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::IoError, "bad field pair on line " + std::to_string(lineno));
      p.fields[pair.substr(0, eq)] = std::stoll(pair.substr(eq + 1));
    }
    if (!trace.empty() && p.arrival_tick < trace.back().arrival_tick)
      throw Error(ErrorCode::IoError,
                  "arrival ticks must be non-decreasing (line " + std::to_string(lineno) + ")");
    trace.push_back(std::move(p));
  }
  return trace;
}

inline std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open trace file " + path);
  return read_trace(in);
}

// Departure-log CSV: packet_id,flow_id,arrival_tick,departure_tick,length_bytes
inline void write_log(std::ostream& out, const DepartureLog& log) {
  out << "packet_id,flow_id,arrival_tick,departure_tick,length_bytes\n";
  for (const auto& d : log)
    out << d.packet_id << "," << d.flow_id << "," << d.arrival_tick << "," << d.departure_tick
        << "," << d.length << "\n";
}

inline DepartureLog read_log(std::istream& in) {
  DepartureLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("packet_id", 0) == 0) continue;
    std::istringstream ls(line);
    DepartureRecord d;
    char c;
    if (!(ls >> d.packet_id >> c >> d.flow_id >> c >> d.arrival_tick >> c >> d.departure_tick >>
          c >> d.length))
      throw Error(ErrorCode::IoError, "bad log record on line " + std::to_string(lineno));
    log.push_back(d);
  }
  return log;
}

// --- trace generators --------------------------------------------------

struct GenSpec {
  std::string kind;             // backlogged | poisson | onoff
  std::int64_t flows = 2;
  std::int64_t length = 100;    // bytes per packet
  std::size_t count = 10000;    // packets to emit
  double rate = 0.1;            // poisson: arrivals per tick per flow
  std::int64_t burst = 10;      // onoff: packets per burst
  std::int64_t idle = 10;       // onoff: ticks between bursts
  std::uint32_t seed = 1;
};

// Deterministic for a fixed spec (including seed); at most one arrival
// per tick so every trace also replays through the mesh model.
inline std::vector<TraceRecord> generate_trace(const GenSpec& spec) {
  if (spec.flows < 1 || spec.length < 1)
    throw Error(ErrorCode::InvalidSpec, "generators need at least one flow and 1-byte packets");
  std::vector<TraceRecord> trace;
  trace.reserve(spec.count);
  std::mt19937 rng(spec.seed);

  if (spec.kind == "backlogged") {
    for (std::size_t i = 0; i < spec.count; ++i) {
      TraceRecord p;
      p.arrival_tick = static_cast<Tick>(i);
      p.packet_id = i;
      p.flow_id = static_cast<FlowId>(i % spec.flows);
      p.length = spec.length;
      trace.push_back(p);
    }
  } else if (spec.kind == "poisson") {
    double total = spec.rate * static_cast<double>(spec.flows);
    if (total > 1.0)
      throw Error(ErrorCode::InvalidSpec,
                  "total poisson rate exceeds one packet per tick");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Tick t = 0;
    while (trace.size() < spec.count) {
      if (u(rng) < total) {
        TraceRecord p;
        p.arrival_tick = t;
        p.packet_id = trace.size();
        p.flow_id = static_cast<FlowId>(u(rng) * spec.flows);
        if (p.flow_id >= spec.flows) p.flow_id = spec.flows - 1;
        p.length = spec.length;
        trace.push_back(p);
      }
      ++t;
    }
  } else if (spec.kind == "onoff") {
    if (spec.burst < 1 || spec.idle < 0)
      throw Error(ErrorCode::InvalidSpec, "onoff needs burst >= 1 and idle >= 0");
    std::uniform_int_distribution<std::int64_t> pick(0, spec.flows - 1);
    Tick t = 0;
    while (trace.size() < spec.count) {
      FlowId f = static_cast<FlowId>(pick(rng));
      for (std::int64_t i = 0; i < spec.burst && trace.size() < spec.count; ++i) {
        TraceRecord p;
        p.arrival_tick = t++;
        p.packet_id = trace.size();
        p.flow_id = f;
        p.length = spec.length;
        trace.push_back(p);
      }
      t += spec.idle;
    }
  } else {
    throw Error(ErrorCode::InvalidSpec, "unknown generator '" + spec.kind + "'");
  }
  return trace;
}

}  // namespace pifo
