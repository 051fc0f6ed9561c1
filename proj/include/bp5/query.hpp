#pragma once

// Two-adaptive-bitprobe membership query. First probe reads table T at the
// element's block bit; a 0 sends the second probe to T0, a 1 to T1; the
// answer is the second bit. query() is the bare hot path; query_traced()
// additionally records both probes and feeds the thread-local read counter
// used by the probe-discipline checks.

#include <cstdint>
#include <stdexcept>

#include "bp5/bitstore.hpp"
#include "bp5/layout.hpp"

namespace bp5 {

enum class ProbeTable : std::uint8_t { T, T0, T1 };

struct Probe {
  ProbeTable table = ProbeTable::T;
  std::uint64_t index = 0;
  bool value = false;

  bool operator==(const Probe&) const = default;
};

struct ProbeTrace {
  Probe first;
  Probe second;
  bool answer = false;

  bool operator==(const ProbeTrace&) const = default;
};

// Counts table reads made through the traced path. Thread-local so parallel
// harness runs do not interfere.
inline std::uint64_t& probe_read_counter() {
  thread_local std::uint64_t reads = 0;
  return reads;
}

inline void reset_probe_reads() { probe_read_counter() = 0; }
inline std::uint64_t probe_reads() { return probe_read_counter(); }

inline bool query(const DataStructure& ds, Element e) {
  const SchemeParams& p = ds.params;
  if (e >= p.m) throw std::out_of_range("query: element out of range");
  const BitAddresses a = addresses(p, e);
  return ds.table_t.get(a.t_bit) ? ds.table_t1.get(a.t1_bit)
                                 : ds.table_t0.get(a.t0_bit);
}

inline ProbeTrace query_traced(const DataStructure& ds, Element e) {
  const SchemeParams& p = ds.params;
  if (e >= p.m) throw std::out_of_range("query: element out of range");
  const BitAddresses a = addresses(p, e);

  auto read = [](const BitArray& table, std::uint64_t index) {
    ++probe_read_counter();
    return table.get(index);
  };

  ProbeTrace trace;
  trace.first = Probe{ProbeTable::T, a.t_bit, read(ds.table_t, a.t_bit)};
  if (trace.first.value) {
    trace.second = Probe{ProbeTable::T1, a.t1_bit, read(ds.table_t1, a.t1_bit)};
  } else {
    trace.second = Probe{ProbeTable::T0, a.t0_bit, read(ds.table_t0, a.t0_bit)};
  }
  trace.answer = trace.second.value;
  return trace;
}

}  // namespace bp5
