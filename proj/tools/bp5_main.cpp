// Command-line front end: build/store/query over serialized structures, the
// verification and space sweeps, and structural diagnostics.
//
// Exit codes: 0 success, 1 verification failure (including an unsatisfiable
// store), 2 usage or format errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bp5/bitstore.hpp"
#include "bp5/diagnostics.hpp"
#include "bp5/layout.hpp"
#include "bp5/query.hpp"
#include "bp5/storage.hpp"
#include "bp5/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;

struct ParamFlags {
  std::uint64_t m = 0;
  std::optional<std::uint64_t> x, z, t;

  bp5::SchemeParams resolve() const {
    return bp5::derive_params(m, bp5::ParamOverrides{x, z, t});
  }
};

void add_param_flags(CLI::App* cmd, ParamFlags& flags) {
  cmd->add_option("--m", flags.m, "universe size")->required();
  cmd->add_option("--x", flags.x, "grid-array side override");
  cmd->add_option("--z", flags.z, "grid width override");
  cmd->add_option("--t", flags.t, "grid height override");
}

void print_params(const bp5::SchemeParams& p) {
  const auto sizes = bp5::table_sizes(p);
  std::cout << "m=" << p.m << " x=" << p.x << " z=" << p.z << " t=" << p.t
            << " n=" << p.n << " superblock=" << p.superblock_size << "\n"
            << "bits_t=" << sizes.t_bits << " bits_t0=" << sizes.t0_bits
            << " bits_t1=" << sizes.t1_bits << " bits_total=" << sizes.total()
            << "\n";
}

const char* table_name(bp5::ProbeTable t) {
  switch (t) {
    case bp5::ProbeTable::T:
      return "T";
    case bp5::ProbeTable::T0:
      return "T0";
    default:
      return "T1";
  }
}

std::string element_list(const std::vector<bp5::Element>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out.empty() ? "-" : out;
}

int cmd_build(const ParamFlags& flags, const std::string& out_path) {
  const auto params = flags.resolve();
  const auto ds = bp5::new_empty(params);
  bp5::save_file(ds, out_path);
  print_params(params);
  std::cout << "out=" << out_path << "\n";
  return kExitOk;
}

int cmd_store(const std::string& in_path, const std::vector<std::uint64_t>& set,
              const std::string& out_path) {
  auto ds = bp5::load_file(in_path);
  const auto label = bp5::store(ds, set);
  bp5::save_file(ds, out_path);
  std::cout << "stored=" << element_list(ds.stored_set)
            << " case=" << label.case_number
            << " partition=" << label.partition_string();
  if (!label.subcase.empty()) std::cout << " subcase=" << label.subcase;
  std::cout << " ones_t=" << ds.table_t.count_ones()
            << " ones_t0=" << ds.table_t0.count_ones()
            << " ones_t1=" << ds.table_t1.count_ones() << "\n";
  return kExitOk;
}

int cmd_query(const std::string& in_path, std::uint64_t elem, bool trace) {
  const auto ds = bp5::load_file(in_path);
  if (trace) {
    const auto tr = bp5::query_traced(ds, elem);
    std::cout << "probe1 table=" << table_name(tr.first.table)
              << " index=" << tr.first.index << " value=" << tr.first.value << "\n"
              << "probe2 table=" << table_name(tr.second.table)
              << " index=" << tr.second.index << " value=" << tr.second.value << "\n"
              << (tr.answer ? "yes" : "no") << "\n";
  } else {
    std::cout << (bp5::query(ds, elem) ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

int cmd_verify(const bp5::VerifyConfig& cfg) {
  const auto params = bp5::derive_params(cfg.m, cfg.overrides);
  const auto report = bp5::verify(cfg);
  std::cout << "mode=" << (cfg.mode == bp5::VerifyMode::Exhaustive ? "exhaustive" : "random")
            << " m=" << params.m << " x=" << params.x << " z=" << params.z
            << " t=" << params.t << " n=" << params.n << " seed=" << cfg.seed
            << " jobs=" << cfg.jobs << "\n"
            << "subsets=" << report.subsets_tested
            << " queries=" << report.queries_issued
            << " failures=" << report.failures_total
            << " unsat=" << report.unsat_count
            << " literal_checks=" << report.literal_cross_checks << "\n";
  for (const auto& [key, count] : report.case_histogram) {
    std::cout << "hist " << key << " = " << count << "\n";
  }
  for (const auto& f : report.failures) {
    std::cerr << "failure kind=" << f.kind << " subset=" << element_list(f.subset)
              << " case=" << f.case_label;
    if (f.kind == "mismatch") {
      std::cerr << " element=" << f.element << " expected=" << f.expected
                << " got=" << f.got;
    }
    if (!f.detail.empty()) std::cerr << " detail=" << f.detail;
    std::cerr << "\n";
  }
  std::cout << "wall_time_sec=" << report.wall_time_sec << "\n"
            << "result=" << (report.ok() ? "pass" : "fail") << "\n";
  return report.ok() ? kExitOk : kExitVerifyFailure;
}

int cmd_sweep(const std::vector<std::uint64_t>& m_list) {
  const auto rows = bp5::space_sweep(m_list);
  double lo = rows.front().ratio, hi = rows.front().ratio;
  for (const auto& row : rows) {
    std::cout << "m=" << row.m << " bits=" << row.bits << " ratio=" << row.ratio << "\n";
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  std::cout << "band_max_min=" << (hi / lo) << "\n";
  if (rows.size() >= 2 && rows.back().m > rows.front().m) {
    const double exponent =
        std::log(static_cast<double>(rows.back().bits) / static_cast<double>(rows.front().bits)) /
        std::log(static_cast<double>(rows.back().m) / static_cast<double>(rows.front().m));
    std::cout << "exponent=" << exponent << "\n";
  }
  return kExitOk;
}

void print_element_report(const bp5::UniverseReport& rep) {
  std::cout << "element=" << rep.element << "\n"
            << "u_b=" << element_list(rep.u_b) << "\n"
            << "u_c=" << element_list(rep.u_c) << "\n"
            << "u2_b=" << element_list(rep.u2_b) << "\n"
            << "u2_c=" << element_list(rep.u2_c) << "\n"
            << "bad_b=" << rep.bad_b << " shared_set=" << rep.bad_b_shared_set
            << " oversized=" << rep.bad_b_oversized << "\n"
            << "bad_c=" << rep.bad_c << " shared_set=" << rep.bad_c_shared_set
            << " oversized=" << rep.bad_c_oversized << "\n";
}

int cmd_diagnose(const ParamFlags& flags, const std::string& abstract_path,
                 std::optional<std::uint64_t> element,
                 std::optional<std::uint64_t> threshold_s) {
  bp5::AbstractScheme sch;
  if (!abstract_path.empty()) {
    std::ifstream in(abstract_path);
    if (!in) throw bp5::FormatError("cannot open: " + abstract_path);
    sch = bp5::parse_abstract(in);
  } else {
    sch = bp5::to_abstract(flags.resolve());
  }
  const std::uint64_t s = threshold_s.value_or(sch.s_b);

  std::cout << "m=" << sch.m << " sA=" << sch.s_a << " sB=" << sch.s_b
            << " sC=" << sch.s_c << " threshold_s=" << s << "\n";
  if (element) {
    if (*element >= sch.m) throw std::out_of_range("diagnose: element out of range");
    print_element_report(bp5::classify_element(sch, *element, s));
    return kExitOk;
  }

  const auto dirty = bp5::cleanliness(sch);
  std::cout << "dirty_sets=" << dirty.size() << "\n";
  for (const auto& d : dirty) {
    std::cout << "dirty table=" << (d.table == bp5::SetTable::B ? "B" : "C")
              << " set=" << d.set_index << "\n";
  }
  std::uint64_t bad_b = 0, bad_c = 0;
  for (bp5::Element e = 0; e < sch.m; ++e) {
    const auto rep = bp5::classify_element(sch, e, s);
    bad_b += rep.bad_b;
    bad_c += rep.bad_c;
  }
  std::cout << "bad_b=" << bad_b << " bad_c=" << bad_c << "\n";
  const auto sum_b = bp5::sum_u2b(sch);
  const auto sum_c = bp5::sum_u2c(sch);
  std::cout << "sum_u2b=" << sum_b.total << " ratio_u2b=" << sum_b.ratio << "\n"
            << "sum_u2c=" << sum_c.total << " ratio_u2c=" << sum_c.ratio << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-probe adaptive bitprobe membership engine"};
  app.require_subcommand(1);

  ParamFlags build_flags;
  std::string build_out;
  auto* build = app.add_subcommand("build", "create an empty structure file");
  add_param_flags(build, build_flags);
  build->add_option("--out", build_out, "output file")->required();

  std::string store_in, store_out;
  std::vector<std::uint64_t> store_set;
  auto* store_cmd = app.add_subcommand("store", "store a set of at most five elements");
  store_cmd->add_option("--in", store_in, "input structure file")->required();
  store_cmd->add_option("--set", store_set, "comma-separated elements")
      ->delimiter(',')
      ->expected(0, 5);
  store_cmd->add_option("--out", store_out, "output structure file")->required();

  std::string query_in;
  std::uint64_t query_elem = 0;
  bool query_trace = false;
  auto* query_cmd = app.add_subcommand("query", "membership query");
  query_cmd->add_option("--in", query_in, "input structure file")->required();
  query_cmd->add_option("--elem", query_elem, "element to query")->required();
  query_cmd->add_flag("--trace", query_trace, "print both probes");

  ParamFlags verify_flags;
  std::string verify_mode = "exhaustive";
  bp5::VerifyConfig vcfg;
  int verify_jobs = 1;
  auto* verify_cmd = app.add_subcommand("verify", "correctness sweep");
  add_param_flags(verify_cmd, verify_flags);
  verify_cmd->add_option("--mode", verify_mode, "exhaustive|random")
      ->check(CLI::IsMember({"exhaustive", "random"}));
  verify_cmd->add_option("--samples", vcfg.sample_count, "random-mode sample count");
  verify_cmd->add_option("--seed", vcfg.seed, "random-mode seed");
  verify_cmd->add_option("--jobs", verify_jobs, "worker threads")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--max-size", vcfg.max_subset_size, "largest subset size")
      ->check(CLI::Range(0, 5));
  verify_cmd->add_option("--min-size", vcfg.min_subset_size, "smallest subset size")
      ->check(CLI::Range(0, 5));
  bool verify_cross = false;
  verify_cmd->add_flag("--literal-cross-check", verify_cross,
                       "also validate hand assignments of cases 1-3");

  std::vector<std::uint64_t> sweep_list;
  auto* sweep_cmd = app.add_subcommand("sweep", "space scaling table");
  sweep_cmd->add_option("--m-list", sweep_list, "comma-separated universe sizes")
      ->delimiter(',')
      ->required();

  ParamFlags diag_flags;
  std::string diag_abstract;
  std::optional<std::uint64_t> diag_element, diag_threshold;
  auto* diag_cmd = app.add_subcommand("diagnose", "universe/badness diagnostics");
  diag_cmd->add_option("--m", diag_flags.m, "universe size (geometric scheme)");
  diag_cmd->add_option("--x", diag_flags.x, "grid-array side override");
  diag_cmd->add_option("--z", diag_flags.z, "grid width override");
  diag_cmd->add_option("--t", diag_flags.t, "grid height override");
  diag_cmd->add_option("--abstract", diag_abstract, "abstract scheme fixture file");
  diag_cmd->add_option("--element", diag_element, "report a single element");
  diag_cmd->add_option("--threshold-s", diag_threshold,
                       "table size for the 2s badness threshold (default: sB)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) return cmd_build(build_flags, build_out);
    if (store_cmd->parsed()) return cmd_store(store_in, store_set, store_out);
    if (query_cmd->parsed()) return cmd_query(query_in, query_elem, query_trace);
    if (verify_cmd->parsed()) {
      vcfg.m = verify_flags.m;
      vcfg.overrides = bp5::ParamOverrides{verify_flags.x, verify_flags.z, verify_flags.t};
      vcfg.mode = verify_mode == "random" ? bp5::VerifyMode::Random
                                          : bp5::VerifyMode::Exhaustive;
      vcfg.jobs = static_cast<unsigned>(verify_jobs);
      vcfg.literal_cross_check = verify_cross;
      return cmd_verify(vcfg);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_list);
    if (diag_cmd->parsed()) {
      if (diag_abstract.empty() && diag_flags.m == 0) {
        std::cerr << "diagnose: need --m or --abstract\n";
        return kExitUsage;
      }
      return cmd_diagnose(diag_flags, diag_abstract, diag_element, diag_threshold);
    }
  } catch (const bp5::UnsatisfiableError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitVerifyFailure;
  } catch (const bp5::FormatError& ex) {
    std::cerr << "format error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& ex) {
    std::cerr << "range error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "usage error: " << ex.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
