#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pifo/packet.hpp"

namespace pifo {

struct DepartureRecord {
  std::uint64_t packet_id = 0;
  FlowId flow_id = 0;
  Tick arrival_tick = 0;
  Tick departure_tick = 0;
  std::int64_t length = 0;
};

using DepartureLog = std::vector<DepartureRecord>;

enum class EventKind { Drop, Defer, Release, NonMonotoneRank, WrapHazard };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Drop: return "Drop";
    case EventKind::Defer: return "Defer";
    case EventKind::Release: return "Release";
    case EventKind::NonMonotoneRank: return "NonMonotoneRank";
    case EventKind::WrapHazard: return "WrapHazard";
  }
  return "Unknown";
}

struct EventRecord {
  Tick tick = 0;
  EventKind kind = EventKind::Drop;
  std::string detail;
};

struct RunResult {
  DepartureLog log;
  std::vector<EventRecord> events;
  bool horizon_exceeded = false;
  std::uint64_t drops = 0;
  Tick max_deferral = 0;  // worst shaping-release slip (mesh mode)
};

}  // namespace pifo
