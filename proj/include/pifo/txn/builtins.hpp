#pragma once

#include <string>

#include "pifo/errors.hpp"
#include "pifo/txn/parser.hpp"

namespace pifo::txn {

// Library of ready-made transactions. Names:
//   stfq, tbf, lstf, stop_and_go, min_rate_root, fifo,
//   field_priority(<field>)
inline TransactionProgram builtin(const std::string& name) {
  if (name == "stfq") {
    return parse_transaction(R"(
      transaction stfq scheduling {
        state virtual_time = 0
        statemap last_finish
        if (f in last_finish) {
          p.start = max(virtual_time, last_finish[f]);
        } else {
          p.start = virtual_time;
        }
        last_finish[f] = p.start + p.length / f.weight;
        p.rank = p.start;
        on_dequeue virtual_time = p.start;
      })");
  }
  if (name == "tbf") {
    // Token bucket filter. The token subtraction is unconditional, so
    // tokens may go negative when a packet is scheduled into the future.
    return parse_transaction(R"(
      transaction tbf shaping {
        param r = 1
        param B = 10
        state tokens = B
        state last_time = 0
        tokens = min(tokens + r * (now - last_time), B);
        if (p.length <= tokens) {
          p.send_time = now;
        } else {
          p.send_time = now + (p.length - tokens) / r;
        }
        tokens = tokens - p.length;
        last_time = now;
        p.rank = p.send_time;
      })");
  }
  if (name == "lstf") {
    return parse_transaction(R"(
      transaction lstf scheduling {
        p.slack = p.slack - p.prev_wait_time;
        p.rank = p.slack;
      })");
  }
  if (name == "stop_and_go") {
    // Frame advance catches up over idle gaps: the current frame is the
    // one containing `now`, not merely the successor of the last frame.
    return parse_transaction(R"(
      transaction stop_and_go shaping {
        param T = 10
        state frame_begin_time = 0
        state frame_end_time = T
        if (now >= frame_end_time) {
          frame_begin_time = frame_end_time + floor((now - frame_end_time) / T) * T;
          frame_end_time = frame_begin_time + T;
        }
        p.rank = frame_end_time;
      })");
  }
  if (name == "min_rate_root") {
    // Per-flow token bucket deciding whether the arriving packet keeps
    // its flow under the minimum rate. Buckets start full on first touch.
    return parse_transaction(R"(
      transaction min_rate_root scheduling {
        param min_rate = 1
        param BURST_SIZE = 10
        statemap tb
        statemap last_time
        if (f in tb) {
        } else {
          tb[f] = BURST_SIZE;
        }
        tb[f] = tb[f] + min_rate * (now - last_time[f]);
        if (tb[f] > BURST_SIZE) {
          tb[f] = BURST_SIZE;
        }
        if (tb[f] > p.size) {
          p.over_min = 0;
          tb[f] = tb[f] - p.size;
        } else {
          p.over_min = 1;
        }
        last_time[f] = now;
        p.rank = p.over_min;
      })");
  }
  if (name == "fifo") {
    return parse_transaction(R"(
      transaction fifo scheduling {
        p.rank = now;
      })");
  }
  if (name.rfind("field_priority(", 0) == 0 && name.back() == ')') {
    std::string field = name.substr(15, name.size() - 16);
    if (field.empty()) throw Error(ErrorCode::UnknownBuiltin, name);
    return parse_transaction("transaction field_priority_" + field +
                             " scheduling { p.rank = p." + field + "; }");
  }
  throw Error(ErrorCode::UnknownBuiltin, name);
}

inline bool is_builtin(const std::string& name) {
  try {
    builtin(name);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace pifo::txn
