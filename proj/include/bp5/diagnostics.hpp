#pragma once

// Structural diagnostics over abstract three-table schemes: universes,
// 2-universes, good/bad element classification, clean/dirty sets, and the
// aggregate 2-universe statistic. An adapter casts the geometric scheme into
// this form (block index / T0 bit / T1 bit as the three maps) so the same
// diagnostics run against it.
//
// Abstract scheme text fixture format, whitespace-separated decimal:
//   line 1: m sA sB sC
//   then m lines: a b c   (the element's indices in tables A, B, C)

#include <algorithm>
#include <cstdint>
#include <istream>
#include <vector>

#include "bp5/errors.hpp"
#include "bp5/layout.hpp"

namespace bp5 {

struct AbstractScheme {
  std::uint64_t m = 0;
  std::uint64_t s_a = 0;  // block count (table A)
  std::uint64_t s_b = 0;  // set count of table B
  std::uint64_t s_c = 0;  // set count of table C
  std::vector<std::uint64_t> map_a;  // element -> block
  std::vector<std::uint64_t> map_b;  // element -> B-set
  std::vector<std::uint64_t> map_c;  // element -> C-set
};

inline void validate_scheme(const AbstractScheme& sch) {
  if (sch.m == 0) throw std::invalid_argument("abstract scheme: empty universe");
  if (sch.map_a.size() != sch.m || sch.map_b.size() != sch.m || sch.map_c.size() != sch.m) {
    throw std::invalid_argument("abstract scheme: map size mismatch");
  }
  for (std::uint64_t e = 0; e < sch.m; ++e) {
    if (sch.map_a[e] >= sch.s_a || sch.map_b[e] >= sch.s_b || sch.map_c[e] >= sch.s_c) {
      throw std::invalid_argument("abstract scheme: map value out of range");
    }
  }
}

namespace detail {

// Inverse maps, built once per traversal-heavy computation.
struct SchemeIndex {
  std::vector<std::vector<Element>> blocks_a, sets_b, sets_c;

  explicit SchemeIndex(const AbstractScheme& sch)
      : blocks_a(sch.s_a), sets_b(sch.s_b), sets_c(sch.s_c) {
    for (Element e = 0; e < sch.m; ++e) {
      blocks_a[sch.map_a[e]].push_back(e);
      sets_b[sch.map_b[e]].push_back(e);
      sets_c[sch.map_c[e]].push_back(e);
    }
  }
};

inline std::vector<Element> sorted_unique(std::vector<Element> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Union over the co-members f of e's set (per `set_of`) of f's block minus f.
inline std::vector<Element> universe_impl(const AbstractScheme& sch, const SchemeIndex& ix,
                                          Element e,
                                          const std::vector<std::uint64_t>& set_of,
                                          const std::vector<std::vector<Element>>& sets) {
  std::vector<Element> out;
  for (Element f : sets[set_of[e]]) {
    if (f == e) continue;
    for (Element g : ix.blocks_a[sch.map_a[f]]) {
      if (g != f) out.push_back(g);
    }
  }
  return sorted_unique(std::move(out));
}

// Union over the universe's elements f of f's other-table set minus f.
inline std::vector<Element> universe2_impl(const std::vector<Element>& universe,
                                           const std::vector<std::uint64_t>& other_set_of,
                                           const std::vector<std::vector<Element>>& other_sets) {
  std::vector<Element> out;
  for (Element f : universe) {
    for (Element g : other_sets[other_set_of[f]]) {
      if (g != f) out.push_back(g);
    }
  }
  return sorted_unique(std::move(out));
}

}  // namespace detail

inline std::vector<Element> universe_b(const AbstractScheme& sch, Element e) {
  detail::SchemeIndex ix(sch);
  return detail::universe_impl(sch, ix, e, sch.map_b, ix.sets_b);
}

inline std::vector<Element> universe_c(const AbstractScheme& sch, Element e) {
  detail::SchemeIndex ix(sch);
  return detail::universe_impl(sch, ix, e, sch.map_c, ix.sets_c);
}

inline std::vector<Element> universe2_b(const AbstractScheme& sch, Element e) {
  detail::SchemeIndex ix(sch);
  return detail::universe2_impl(detail::universe_impl(sch, ix, e, sch.map_b, ix.sets_b),
                                sch.map_c, ix.sets_c);
}

inline std::vector<Element> universe2_c(const AbstractScheme& sch, Element e) {
  detail::SchemeIndex ix(sch);
  return detail::universe2_impl(detail::universe_impl(sch, ix, e, sch.map_c, ix.sets_c),
                                sch.map_b, ix.sets_b);
}

// Badness per the two defining clauses, reported separately: two universe
// elements sharing a set in the other table, or a 2-universe larger than 2s.
struct UniverseReport {
  Element element = 0;
  std::vector<Element> u_b, u_c;
  std::vector<Element> u2_b, u2_c;
  bool bad_b = false, bad_c = false;
  bool bad_b_shared_set = false, bad_b_oversized = false;
  bool bad_c_shared_set = false, bad_c_oversized = false;
};

namespace detail {

inline bool two_share_a_set(const std::vector<Element>& universe,
                            const std::vector<std::uint64_t>& set_of) {
  std::vector<std::uint64_t> seen;
  seen.reserve(universe.size());
  for (Element f : universe) seen.push_back(set_of[f]);
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) != seen.end();
}

}  // namespace detail

// `s` is the table size Definition-style thresholds are measured against;
// the caller picks it because the tables here need not have equal sizes.
inline UniverseReport classify_element(const AbstractScheme& sch, Element e,
                                       std::uint64_t s) {
  if (s < 1) throw std::invalid_argument("classify_element: s must be positive");
  detail::SchemeIndex ix(sch);
  UniverseReport rep;
  rep.element = e;
  rep.u_b = detail::universe_impl(sch, ix, e, sch.map_b, ix.sets_b);
  rep.u_c = detail::universe_impl(sch, ix, e, sch.map_c, ix.sets_c);
  rep.u2_b = detail::universe2_impl(rep.u_b, sch.map_c, ix.sets_c);
  rep.u2_c = detail::universe2_impl(rep.u_c, sch.map_b, ix.sets_b);

  rep.bad_b_shared_set = detail::two_share_a_set(rep.u_b, sch.map_c);
  rep.bad_b_oversized = rep.u2_b.size() > 2 * s;
  rep.bad_b = rep.bad_b_shared_set || rep.bad_b_oversized;

  rep.bad_c_shared_set = detail::two_share_a_set(rep.u_c, sch.map_b);
  rep.bad_c_oversized = rep.u2_c.size() > 2 * s;
  rep.bad_c = rep.bad_c_shared_set || rep.bad_c_oversized;
  return rep;
}

enum class SetTable : std::uint8_t { B, C };

struct DirtySet {
  SetTable table = SetTable::B;
  std::uint64_t set_index = 0;

  auto operator<=>(const DirtySet&) const = default;
};

// Every B- or C-set holding two elements of one block.
inline std::vector<DirtySet> cleanliness(const AbstractScheme& sch) {
  detail::SchemeIndex ix(sch);
  std::vector<DirtySet> out;
  auto scan = [&](const std::vector<std::vector<Element>>& sets, SetTable table) {
    for (std::uint64_t s = 0; s < sets.size(); ++s) {
      std::vector<std::uint64_t> blocks;
      blocks.reserve(sets[s].size());
      for (Element e : sets[s]) blocks.push_back(sch.map_a[e]);
      std::sort(blocks.begin(), blocks.end());
      if (std::adjacent_find(blocks.begin(), blocks.end()) != blocks.end()) {
        out.push_back(DirtySet{table, s});
      }
    }
  };
  scan(ix.sets_b, SetTable::B);
  scan(ix.sets_c, SetTable::C);
  return out;
}

struct UniverseSum {
  std::uint64_t total = 0;  // sum over all elements of |2-universe|
  double ratio = 0.0;       // total / (m^4 / s^3), s = the relevant set count
};

namespace detail {

inline UniverseSum sum_u2_impl(const AbstractScheme& sch, bool wrt_b) {
  SchemeIndex ix(sch);
  UniverseSum sum;
  for (Element e = 0; e < sch.m; ++e) {
    const auto u = wrt_b ? universe_impl(sch, ix, e, sch.map_b, ix.sets_b)
                         : universe_impl(sch, ix, e, sch.map_c, ix.sets_c);
    const auto u2 = wrt_b ? universe2_impl(u, sch.map_c, ix.sets_c)
                          : universe2_impl(u, sch.map_b, ix.sets_b);
    sum.total += u2.size();
  }
  const double m = static_cast<double>(sch.m);
  const double s = static_cast<double>(wrt_b ? sch.s_b : sch.s_c);
  sum.ratio = static_cast<double>(sum.total) / (m * m * m * m / (s * s * s));
  return sum;
}

}  // namespace detail

inline UniverseSum sum_u2b(const AbstractScheme& sch) {
  return detail::sum_u2_impl(sch, true);
}

inline UniverseSum sum_u2c(const AbstractScheme& sch) {
  return detail::sum_u2_impl(sch, false);
}

// The geometric scheme as an abstract one: block index for table A, T0 bit
// for table B, T1 bit for table C, over the real (unpadded) universe.
inline AbstractScheme to_abstract(const SchemeParams& p) {
  const TableSizes sizes = table_sizes(p);
  AbstractScheme sch;
  sch.m = p.m;
  sch.s_a = sizes.t_bits;
  sch.s_b = sizes.t0_bits;
  sch.s_c = sizes.t1_bits;
  sch.map_a.resize(p.m);
  sch.map_b.resize(p.m);
  sch.map_c.resize(p.m);
  for (Element e = 0; e < p.m; ++e) {
    const BitAddresses a = addresses(p, e);
    sch.map_a[e] = a.t_bit;
    sch.map_b[e] = a.t0_bit;
    sch.map_c[e] = a.t1_bit;
  }
  return sch;
}

inline AbstractScheme parse_abstract(std::istream& in) {
  AbstractScheme sch;
  if (!(in >> sch.m >> sch.s_a >> sch.s_b >> sch.s_c)) {
    throw FormatError("abstract scheme: bad header line");
  }
  if (sch.m == 0 || sch.m > (std::uint64_t{1} << 24)) {
    throw FormatError("abstract scheme: unreasonable universe size");
  }
  sch.map_a.resize(sch.m);
  sch.map_b.resize(sch.m);
  sch.map_c.resize(sch.m);
  for (std::uint64_t e = 0; e < sch.m; ++e) {
    if (!(in >> sch.map_a[e] >> sch.map_b[e] >> sch.map_c[e])) {
      throw FormatError("abstract scheme: truncated map rows");
    }
  }
  try {
    validate_scheme(sch);
  } catch (const std::invalid_argument& ex) {
    throw FormatError(std::string("abstract scheme: ") + ex.what());
  }
  return sch;
}

}  // namespace bp5
