#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <vector>

#include "pifo/log.hpp"

namespace pifo {

struct FlowStats {
  std::uint64_t packets = 0;
  std::int64_t bytes = 0;
  double mean_sojourn = 0.0;
  Tick max_sojourn = 0;
  std::vector<std::int64_t> window_bytes;  // departed bytes per window
};

struct StatsReport {
  std::map<FlowId, FlowStats> flows;
  std::uint64_t total_packets = 0;
  std::int64_t total_bytes = 0;
  Tick window = 0;

  double share(FlowId f) const {
    auto it = flows.find(f);
    if (it == flows.end() || total_bytes == 0) return 0.0;
    return static_cast<double>(it->second.bytes) / static_cast<double>(total_bytes);
  }
};

inline StatsReport compute_stats(const DepartureLog& log, Tick window = 1000) {
  StatsReport rep;
  rep.window = window;
  Tick last = 0;
  for (const auto& d : log) last = std::max(last, d.departure_tick);
  std::size_t windows = log.empty() ? 0 : static_cast<std::size_t>(last / window) + 1;

  std::map<FlowId, Tick> sojourn_sum;
  for (const auto& d : log) {
    FlowStats& fs = rep.flows[d.flow_id];
    if (fs.window_bytes.empty()) fs.window_bytes.resize(windows, 0);
    ++fs.packets;
    fs.bytes += d.length;
    Tick s = d.departure_tick - d.arrival_tick;
    sojourn_sum[d.flow_id] += s;
    fs.max_sojourn = std::max(fs.max_sojourn, s);
    fs.window_bytes[static_cast<std::size_t>(d.departure_tick / window)] += d.length;
    ++rep.total_packets;
    rep.total_bytes += d.length;
  }
  for (auto& [f, fs] : rep.flows)
    fs.mean_sojourn = static_cast<double>(sojourn_sum[f]) / static_cast<double>(fs.packets);
  return rep;
}

inline void write_stats(std::ostream& out, const StatsReport& rep) {
  out << "flow_id,packets,bytes,share,mean_sojourn,max_sojourn\n";
  for (const auto& [f, fs] : rep.flows)
    out << f << "," << fs.packets << "," << fs.bytes << "," << rep.share(f) << ","
        << fs.mean_sojourn << "," << fs.max_sojourn << "\n";
  out << "# windows of " << rep.window << " ticks: flow_id,window_index,bytes\n";
  for (const auto& [f, fs] : rep.flows)
    for (std::size_t w = 0; w < fs.window_bytes.size(); ++w)
      if (fs.window_bytes[w] != 0) out << f << "," << w << "," << fs.window_bytes[w] << "\n";
}

}  // namespace pifo
