#pragma once

// Verification harness: exhaustive and seeded-random correctness sweeps over
// subsets of size at most five, plus the space-scaling sweep.
//
// Determinism: exhaustive mode walks subsets ordered by size then
// lexicographically; random mode derives an independent generator per sample
// index from the seed. Workers own disjoint index ranges and local reports
// merged in worker order, so results do not depend on the worker count.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "bp5/bitstore.hpp"
#include "bp5/layout.hpp"
#include "bp5/query.hpp"
#include "bp5/storage.hpp"

namespace bp5 {

using u128 = unsigned __int128;

// Exact binomial coefficient; k is tiny here (at most 5).
inline u128 comb(std::uint64_t n, int k) {
  if (k < 0 || static_cast<std::uint64_t>(k) > n) return 0;
  u128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(i)) /
        static_cast<std::uint64_t>(i);
  }
  return r;
}

inline u128 subset_count(std::uint64_t m, int min_size, int max_size) {
  u128 total = 0;
  for (int k = min_size; k <= max_size; ++k) total += comb(m, k);
  return total;
}

namespace detail {

// Lexicographic unranking of a k-combination of [0, m).
inline std::vector<Element> unrank_combination(std::uint64_t m, int k, u128 rank) {
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(k));
  Element next = 0;
  for (int pos = 0; pos < k; ++pos) {
    for (Element c = next;; ++c) {
      const u128 with_c = comb(m - c - 1, k - pos - 1);
      if (rank < with_c) {
        out.push_back(c);
        next = c + 1;
        break;
      }
      rank -= with_c;
    }
  }
  return out;
}

}  // namespace detail

// Subset at `rank` in the size-then-lex order over sizes [min_size, max_size].
inline std::vector<Element> unrank_subset(std::uint64_t m, int min_size, int max_size,
                                          u128 rank) {
  for (int k = min_size; k <= max_size; ++k) {
    const u128 cnt = comb(m, k);
    if (rank < cnt) return detail::unrank_combination(m, k, rank);
    rank -= cnt;
  }
  throw std::out_of_range("unrank_subset: rank beyond subset count");
}

// Successor in the same order; false once the last size-max_size subset is
// passed. An empty subset advances to {0} when sizes allow.
inline bool next_subset(std::uint64_t m, int max_size, std::vector<Element>& s) {
  const int k = static_cast<int>(s.size());
  for (int i = k - 1; i >= 0; --i) {
    if (s[static_cast<std::size_t>(i)] < m - static_cast<std::uint64_t>(k - i)) {
      ++s[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  // Roll over to the first subset of the next size.
  if (k >= max_size || static_cast<std::uint64_t>(k) >= m) return false;
  s.resize(static_cast<std::size_t>(k) + 1);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
  return true;
}

namespace detail {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Uniform in [0, n) by rejection; platform-independent.
inline std::uint64_t bounded(SplitMix64& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v;
  do {
    v = rng.next();
  } while (v >= limit);
  return v % n;
}

}  // namespace detail

// Sample `index` of the seeded stream: size uniform in [min_size, max_size]
// (clamped to m), then a uniform subset of that size via Floyd's algorithm.
inline std::vector<Element> sample_subset(std::uint64_t seed, std::uint64_t index,
                                          std::uint64_t m, int min_size, int max_size) {
  detail::SplitMix64 rng{seed ^ (0xd1b54a32d192ed03ull * (index + 1))};
  const auto hi = std::min<std::uint64_t>(static_cast<std::uint64_t>(max_size), m);
  const auto lo = std::min<std::uint64_t>(static_cast<std::uint64_t>(min_size), hi);
  const std::uint64_t k = lo + detail::bounded(rng, hi - lo + 1);

  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::uint64_t j = m - k; j < m; ++j) {
    const std::uint64_t v = detail::bounded(rng, j + 1);
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      out.push_back(j);
    } else {
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

enum class VerifyMode { Exhaustive, Random };

struct VerifyConfig {
  std::uint64_t m = 1;
  ParamOverrides overrides;
  VerifyMode mode = VerifyMode::Exhaustive;
  int min_subset_size = 0;   // lower size bound (both modes)
  int max_subset_size = 5;
  std::uint64_t sample_count = 100000;  // random mode only
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  // Cross-check every case-1/2/3 instance: the hand assignment must satisfy
  // the clause set and verify, and the solver path must verify too.
  bool literal_cross_check = false;
};

struct VerifyFailure {
  std::string kind;  // "mismatch", "unsat", or "literal"
  std::vector<Element> subset;
  Element element = 0;       // mismatch only
  bool expected = false;     // mismatch only
  bool got = false;          // mismatch only
  std::string case_label;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t subsets_tested = 0;
  std::uint64_t queries_issued = 0;
  std::uint64_t unsat_count = 0;
  std::uint64_t literal_cross_checks = 0;
  std::uint64_t failures_total = 0;  // failures.size() unless capped
  std::vector<VerifyFailure> failures;
  std::map<std::string, std::uint64_t> case_histogram;
  double wall_time_sec = 0.0;

  bool ok() const { return failures_total == 0; }
};

namespace detail {

// Bounds memory if a broken build fails everywhere; counters stay exact.
inline constexpr std::size_t kMaxStoredFailures = 10000;

inline void add_failure(VerifyReport& rep, VerifyFailure f) {
  ++rep.failures_total;
  if (rep.failures.size() < kMaxStoredFailures) rep.failures.push_back(std::move(f));
}

inline std::string subset_string(const std::vector<Element>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + "}";
}

inline void run_subset(const SchemeParams& params, const std::vector<Element>& subset,
                       bool literal_cross_check, DataStructure& ds,
                       DataStructure& scratch, VerifyReport& rep) {
  ++rep.subsets_tested;
  CaseLabel label;
  try {
    label = store(ds, subset);
  } catch (const UnsatisfiableError& ex) {
    ++rep.unsat_count;
    label = classify(params, subset);
    rep.case_histogram[label.histogram_key()]++;
    add_failure(rep, VerifyFailure{"unsat", subset, 0, false, false,
                                   label.histogram_key(), ex.what()});
    return;
  }
  rep.case_histogram[label.histogram_key()]++;

  for (Element e = 0; e < params.m; ++e) {
    const bool expected = std::binary_search(subset.begin(), subset.end(), e);
    const bool got = query(ds, e);
    ++rep.queries_issued;
    if (got != expected) {
      add_failure(rep, VerifyFailure{"mismatch", subset, e, expected, got,
                                     label.histogram_key(), ""});
    }
  }

  if (literal_cross_check && label.case_number >= 1 && label.case_number <= 3) {
    ++rep.literal_cross_checks;
    const auto clauses = build_clauses(params, subset);
    auto check_assignment = [&](const BlockAssignment& asg, const char* which) {
      write_bits(scratch, subset, asg);
      for (Element e = 0; e < params.m; ++e) {
        const bool expected = std::binary_search(subset.begin(), subset.end(), e);
        if (query(scratch, e) != expected) {
          add_failure(rep, VerifyFailure{"literal", subset, e, expected, !expected,
                                         label.histogram_key(),
                                         std::string(which) + " assignment misanswers"});
          return;
        }
      }
    };

    if (const auto lit = literal_assignment(params, subset, label)) {
      if (!satisfies(*lit, clauses)) {
        add_failure(rep, VerifyFailure{"literal", subset, 0, false, false,
                                       label.histogram_key(),
                                       "hand assignment violates a clause"});
      }
      check_assignment(*lit, "hand");
    }
    const auto relevant = relevant_blocks(params, subset, clauses);
    if (const auto solved = solve_assignment(clauses, relevant)) {
      check_assignment(*solved, "solver");
    } else {
      ++rep.unsat_count;
      add_failure(rep, VerifyFailure{"unsat", subset, 0, false, false,
                                     label.histogram_key(),
                                     "solver unsat on a literal-case instance"});
    }
  }
}

inline void merge_into(VerifyReport& total, const VerifyReport& part) {
  total.subsets_tested += part.subsets_tested;
  total.queries_issued += part.queries_issued;
  total.unsat_count += part.unsat_count;
  total.literal_cross_checks += part.literal_cross_checks;
  total.failures_total += part.failures_total;
  for (const auto& f : part.failures) {
    if (total.failures.size() < kMaxStoredFailures) total.failures.push_back(f);
  }
  for (const auto& [key, count] : part.case_histogram) total.case_histogram[key] += count;
}

}  // namespace detail

inline VerifyReport verify(const VerifyConfig& cfg) {
  if (cfg.max_subset_size < 0 || cfg.max_subset_size > 5) {
    throw std::invalid_argument("verify: max subset size must be in [0, 5]");
  }
  if (cfg.min_subset_size < 0 || cfg.min_subset_size > cfg.max_subset_size) {
    throw std::invalid_argument("verify: min subset size must be in [0, max]");
  }
  if (cfg.mode == VerifyMode::Random && cfg.sample_count < 1) {
    throw std::invalid_argument("verify: random mode needs at least one sample");
  }
  if (cfg.mode == VerifyMode::Exhaustive && cfg.m > (std::uint64_t{1} << 24)) {
    throw std::invalid_argument("verify: exhaustive mode supports m up to 2^24");
  }

  const SchemeParams params = derive_params(cfg.m, cfg.overrides);
  const unsigned jobs = std::max(1u, cfg.jobs);
  const auto t_start = std::chrono::steady_clock::now();

  const u128 total_work = cfg.mode == VerifyMode::Exhaustive
                              ? subset_count(cfg.m, cfg.min_subset_size, cfg.max_subset_size)
                              : cfg.sample_count;

  std::vector<VerifyReport> parts(jobs);
  auto worker = [&](unsigned w, u128 lo, u128 hi) {
    VerifyReport& rep = parts[w];
    DataStructure ds = new_empty(params);
    DataStructure scratch = new_empty(params);
    if (cfg.mode == VerifyMode::Exhaustive) {
      if (lo >= hi) return;
      std::vector<Element> subset =
          unrank_subset(cfg.m, cfg.min_subset_size, cfg.max_subset_size, lo);
      for (u128 rank = lo; rank < hi; ++rank) {
        detail::run_subset(params, subset, cfg.literal_cross_check, ds, scratch, rep);
        if (rank + 1 < hi) next_subset(cfg.m, cfg.max_subset_size, subset);
      }
    } else {
      for (u128 i = lo; i < hi; ++i) {
        const auto subset = sample_subset(cfg.seed, static_cast<std::uint64_t>(i), cfg.m,
                                          cfg.min_subset_size, cfg.max_subset_size);
        detail::run_subset(params, subset, cfg.literal_cross_check, ds, scratch, rep);
      }
    }
  };

  if (jobs == 1) {
    worker(0, 0, total_work);
  } else {
    std::vector<std::thread> threads;
    const u128 chunk = total_work / jobs;
    const u128 extra = total_work % jobs;
    u128 lo = 0;
    for (unsigned w = 0; w < jobs; ++w) {
      const u128 hi = lo + chunk + (w < extra ? 1 : 0);
      threads.emplace_back(worker, w, lo, hi);
      lo = hi;
    }
    for (auto& th : threads) th.join();
  }

  VerifyReport report;
  for (const auto& part : parts) detail::merge_into(report, part);
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

struct SweepRow {
  std::uint64_t m = 0;
  std::uint64_t bits = 0;
  double ratio = 0.0;  // bits / m^{5/6}
};

inline std::vector<SweepRow> space_sweep(const std::vector<std::uint64_t>& m_list) {
  if (m_list.empty()) throw std::invalid_argument("space_sweep: empty m list");
  std::vector<SweepRow> rows;
  rows.reserve(m_list.size());
  for (std::uint64_t m : m_list) {
    const SchemeParams p = derive_params(m);
    const std::uint64_t bits = table_sizes(p).total();
    const double ratio =
        static_cast<double>(bits) / std::pow(static_cast<double>(m), 5.0 / 6.0);
    rows.push_back(SweepRow{m, bits, ratio});
  }
  return rows;
}

// Query sweep used by tests and cross-checks: number of elements whose answer
// disagrees with membership in `members` (must be sorted).
inline std::uint64_t count_query_errors(const DataStructure& ds,
                                        std::span<const Element> members) {
  std::uint64_t errors = 0;
  for (Element e = 0; e < ds.params.m; ++e) {
    const bool expected = std::binary_search(members.begin(), members.end(), e);
    if (query(ds, e) != expected) ++errors;
  }
  return errors;
}

}  // namespace bp5
