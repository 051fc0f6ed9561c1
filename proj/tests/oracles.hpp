#pragma once

// Independent reference implementations used only by the test and acceptance
// binaries. They follow the definitions directly (full scans, exhaustive
// enumeration) and share no code with the library paths they check.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "bp5/diagnostics.hpp"
#include "bp5/layout.hpp"
#include "bp5/storage.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Diagnostics: universes by literal double scan.
// ---------------------------------------------------------------------------

inline std::vector<bp5::Element> naive_universe(const bp5::AbstractScheme& sch,
                                                bp5::Element e, bool wrt_b) {
  const auto& set_map = wrt_b ? sch.map_b : sch.map_c;
  std::set<bp5::Element> out;
  for (bp5::Element f = 0; f < sch.m; ++f) {
    if (f == e || set_map[f] != set_map[e]) continue;
    for (bp5::Element g = 0; g < sch.m; ++g) {
      if (g != f && sch.map_a[g] == sch.map_a[f]) out.insert(g);
    }
  }
  return {out.begin(), out.end()};
}

inline std::vector<bp5::Element> naive_universe2(const bp5::AbstractScheme& sch,
                                                 bp5::Element e, bool wrt_b) {
  const auto& other_map = wrt_b ? sch.map_c : sch.map_b;
  std::set<bp5::Element> out;
  for (bp5::Element f : naive_universe(sch, e, wrt_b)) {
    for (bp5::Element g = 0; g < sch.m; ++g) {
      if (g != f && other_map[g] == other_map[f]) out.insert(g);
    }
  }
  return {out.begin(), out.end()};
}

struct NaiveBadness {
  bool shared_set = false;
  bool oversized = false;
  bool bad() const { return shared_set || oversized; }
};

inline NaiveBadness naive_badness(const bp5::AbstractScheme& sch, bp5::Element e,
                                  std::uint64_t s, bool wrt_b) {
  const auto& other_map = wrt_b ? sch.map_c : sch.map_b;
  const auto universe = naive_universe(sch, e, wrt_b);
  NaiveBadness result;
  for (std::size_t i = 0; i < universe.size() && !result.shared_set; ++i) {
    for (std::size_t j = i + 1; j < universe.size(); ++j) {
      if (other_map[universe[i]] == other_map[universe[j]]) {
        result.shared_set = true;
        break;
      }
    }
  }
  result.oversized = naive_universe2(sch, e, wrt_b).size() > 2 * s;
  return result;
}

// ---------------------------------------------------------------------------
// Conflict clauses by all-pairs scan over the real universe.
// ---------------------------------------------------------------------------

inline std::vector<bp5::ConflictClause> brute_clauses(const bp5::SchemeParams& p,
                                                      std::span<const bp5::Element> members) {
  std::vector<bp5::ConflictClause> out;
  auto is_member = [&](bp5::Element f) {
    return std::find(members.begin(), members.end(), f) != members.end();
  };
  for (bp5::Element e : members) {
    const auto ae = bp5::addresses(p, e);
    const auto be = bp5::block_of(p, e);
    for (bp5::Element f = 0; f < p.m; ++f) {
      if (f == e || is_member(f)) continue;
      const auto af = bp5::addresses(p, f);
      const auto bf = bp5::block_of(p, f);
      if (ae.t1_bit == af.t1_bit && !(be == bf)) {
        out.push_back(bp5::ConflictClause::make(be, bf, bp5::TableSide::T1));
      }
      if (ae.t0_bit == af.t0_bit && !(be == bf)) {
        out.push_back(bp5::ConflictClause::make(be, bf, bp5::TableSide::T0));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive two-table assignment search (the 2-SAT oracle).
// ---------------------------------------------------------------------------

inline bool clause_ok(const std::vector<bp5::TableSide>& values,
                      std::span<const bp5::BlockId> vars,
                      const bp5::ConflictClause& c) {
  const auto idx = [&](const bp5::BlockId& blk) {
    return static_cast<std::size_t>(
        std::lower_bound(vars.begin(), vars.end(), blk) - vars.begin());
  };
  return !(values[idx(c.a)] == c.forbidden && values[idx(c.b)] == c.forbidden);
}

// All satisfying assignments over the (sorted) variable blocks, in mask
// order with bit v set meaning variable v goes to T1. Vars capped at 20.
inline std::vector<std::vector<bp5::TableSide>> enumerate_satisfying(
    std::span<const bp5::BlockId> vars, std::span<const bp5::ConflictClause> clauses) {
  std::vector<std::vector<bp5::TableSide>> out;
  if (vars.size() > 20) throw std::invalid_argument("enumerate_satisfying: too many variables");
  const std::uint32_t limit = 1u << vars.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    std::vector<bp5::TableSide> values(vars.size());
    for (std::size_t v = 0; v < vars.size(); ++v) {
      values[v] = (mask >> v) & 1u ? bp5::TableSide::T1 : bp5::TableSide::T0;
    }
    bool ok = true;
    for (const auto& c : clauses) {
      if (!clause_ok(values, vars, c)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(std::move(values));
  }
  return out;
}

inline bool brute_satisfiable(std::span<const bp5::BlockId> vars,
                              std::span<const bp5::ConflictClause> clauses) {
  return !enumerate_satisfying(vars, clauses).empty();
}

inline bp5::BlockAssignment to_assignment(std::span<const bp5::BlockId> vars,
                                          const std::vector<bp5::TableSide>& values) {
  bp5::BlockAssignment asg;
  for (std::size_t v = 0; v < vars.size(); ++v) asg.assigned[vars[v]] = values[v];
  return asg;
}

// ---------------------------------------------------------------------------
// Generators.
// ---------------------------------------------------------------------------

// m = n superblocks of x^2*z*t elements, optionally shrunk so the last
// superblock is partly padding.
inline bp5::SchemeParams make_params(std::uint64_t x, std::uint64_t z, std::uint64_t t,
                                     std::uint64_t n, bool padded = false) {
  const std::uint64_t sbs = x * x * z * t;
  std::uint64_t m = n * sbs;
  if (padded && sbs > 1) m -= sbs / 2;
  return bp5::derive_params(m, bp5::ParamOverrides{x, z, t});
}

inline std::vector<bp5::SchemeParams> small_param_pool() {
  std::vector<bp5::SchemeParams> pool;
  for (std::uint64_t x : {1, 2, 3}) {
    for (std::uint64_t z : {1, 2, 4}) {
      for (std::uint64_t t : {1, 2, 3}) {
        for (std::uint64_t n : {1, 2, 5}) {
          pool.push_back(make_params(x, z, t, n));
          pool.push_back(make_params(x, z, t, n, /*padded=*/true));
        }
      }
    }
  }
  return pool;
}

inline std::vector<bp5::Element> random_subset(std::mt19937_64& rng, std::uint64_t m,
                                               std::size_t max_size) {
  const std::size_t k = rng() % (std::min<std::uint64_t>(max_size, m) + 1);
  std::set<bp5::Element> out;
  while (out.size() < k) out.insert(rng() % m);
  return {out.begin(), out.end()};
}

inline bp5::AbstractScheme random_scheme(std::mt19937_64& rng, std::uint64_t m,
                                         std::uint64_t s_a, std::uint64_t s_b,
                                         std::uint64_t s_c) {
  bp5::AbstractScheme sch;
  sch.m = m;
  sch.s_a = s_a;
  sch.s_b = s_b;
  sch.s_c = s_c;
  sch.map_a.resize(m);
  sch.map_b.resize(m);
  sch.map_c.resize(m);
  for (bp5::Element e = 0; e < m; ++e) {
    sch.map_a[e] = rng() % s_a;
    sch.map_b[e] = rng() % s_b;
    sch.map_c[e] = rng() % s_c;
  }
  return sch;
}

// Per-block injective B and C assignments, i.e. every set is clean.
inline bp5::AbstractScheme random_clean_scheme(std::mt19937_64& rng, std::uint64_t m,
                                               std::uint64_t s_a, std::uint64_t s_b,
                                               std::uint64_t s_c) {
  bp5::AbstractScheme sch;
  sch.m = m;
  sch.s_a = s_a;
  sch.s_b = s_b;
  sch.s_c = s_c;
  sch.map_a.resize(m);
  sch.map_b.resize(m);
  sch.map_c.resize(m);
  std::vector<std::vector<bp5::Element>> blocks(s_a);
  for (bp5::Element e = 0; e < m; ++e) {
    const std::uint64_t a = rng() % s_a;
    sch.map_a[e] = a;
    blocks[a].push_back(e);
  }
  auto deal = [&](std::vector<std::uint64_t>& out, std::uint64_t sets,
                  const std::vector<bp5::Element>& block) {
    std::vector<std::uint64_t> ids(sets);
    for (std::uint64_t i = 0; i < sets; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    if (block.size() > sets) throw std::invalid_argument("clean scheme: block too large");
    for (std::size_t i = 0; i < block.size(); ++i) out[block[i]] = ids[i];
  };
  for (const auto& block : blocks) {
    deal(sch.map_b, s_b, block);
    deal(sch.map_c, s_c, block);
  }
  return sch;
}

}  // namespace oracles
