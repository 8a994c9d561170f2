// Command-line front end. Links only the public C API (wellround.h); all file
// formats are the library's JSON/CSV conventions.
//
// Exit codes: 0 success, 1 parse/validation failure, 2 enumeration budget
// exceeded, 3 search budget exhausted before reaching geom_tol, 4 cover
// certification raised the VIOLATED flag.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wellround.h"

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::uint64_t seed = 0;
  std::uint64_t budget = 10000;
  double rank_tol = 1e-7;
  double geom_tol = 1e-6;
  double eta_margin = 0.5;
  std::string output_dir;
  std::string format = "json";
};

class CliError : public std::runtime_error {
public:
  CliError(int exit_code, const std::string& what) : std::runtime_error(what), code(exit_code) {}
  int code;
};

int exit_code_for(wr_status s) {
  switch (s) {
    case WR_OK: return 0;
    case WR_ERR_ENUM_BUDGET: return 2;
    default: return 1;
  }
}

void check(wr_status s) {
  if (s != WR_OK) throw CliError(exit_code_for(s), wr_last_error());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  wr_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw CliError(1, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw CliError(1, "cannot write " + path);
  out << content;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw CliError(1, "cannot parse number: " + item);
    }
  }
  return out;
}

// Writes the primary JSON (and optional CSV) according to config.
void emit(const RunConfig& cfg, const std::string& name, const std::string& payload_json,
          const std::string& csv = "", const std::string& csv_name = "") {
  if (cfg.format == "csv" && !csv.empty()) {
    std::cout << csv;
  } else {
    std::cout << payload_json << "\n";
  }
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    write_file(cfg.output_dir + "/" + name + ".json", payload_json + "\n");
    if (!csv.empty())
      write_file(cfg.output_dir + "/" + (csv_name.empty() ? name : csv_name) + ".csv", csv);
  }
}

struct LatticeHandle {
  wr_lattice* ptr = nullptr;
  ~LatticeHandle() { wr_lattice_free(ptr); }
};

struct OrbitHandle {
  wr_orbit* ptr = nullptr;
  ~OrbitHandle() { wr_orbit_free(ptr); }
};

struct CoverHandle {
  wr_cover* ptr = nullptr;
  ~CoverHandle() { wr_cover_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wellround: well-rounded lattices on closed diagonal orbits and "
               "grid-scale cover certification"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  RunConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags take precedence)");
  auto* opt_seed = app.add_option("--seed", cfg.seed, "random seed");
  auto* opt_budget = app.add_option("--budget", cfg.budget, "evaluation budget (>= 100)");
  auto* opt_rank_tol = app.add_option("--rank-tol", cfg.rank_tol, "rank tolerance (> 0)");
  auto* opt_geom_tol = app.add_option("--geom-tol", cfg.geom_tol, "geometric tolerance (> 0)");
  auto* opt_eta = app.add_option("--eta-margin", cfg.eta_margin, "search margin (> 0)");
  auto* opt_outdir = app.add_option("--output-dir", cfg.output_dir, "directory for result files");
  auto* opt_format =
      app.add_option("--format", cfg.format, "stdout payload: json or csv")->check(
          CLI::IsMember({"json", "csv"}));

  // svp
  std::string svp_file;
  double svp_delta = 0.5;
  std::uint64_t svp_enum_budget = 0;  // 0: library default (1e6 nodes)
  auto* svp = app.add_subcommand("svp", "short vectors of a lattice file");
  svp->add_option("lattice", svp_file, "lattice JSON file")->required();
  svp->add_option("--delta-max", svp_delta, "enumeration range");
  svp->add_option("--enum-budget", svp_enum_budget, "enumeration node cap (default 1e6)");

  // wr-check
  std::string wr_file;
  double wr_tol = 0.0;
  bool wr_generic = false;
  auto* wrc = app.add_subcommand("wr-check", "well-roundedness of a lattice file");
  wrc->add_option("lattice", wr_file)->required();
  wrc->add_option("--tol", wr_tol, "length tolerance");
  wrc->add_flag("--generic", wr_generic, "also test genericity and transversality rank");

  // dim-delta
  std::string dd_file;
  double dd_delta = 0.1;
  auto* dd = app.add_subcommand("dim-delta", "dimension of the span of near-minimal vectors");
  dd->add_option("lattice", dd_file)->required();
  dd->add_option("--delta", dd_delta)->required();

  // cover-membership
  std::string cm_file, cm_a;
  double cm_eps = 0.04;
  auto* cm = app.add_subcommand("cover-membership", "index j with dim_{j eps}(a x) = j");
  cm->add_option("lattice", cm_file)->required();
  cm->add_option("--a", cm_a, "log coordinates of a, comma separated")->required();
  cm->add_option("--eps", cm_eps);

  // orbit (compact | search)
  auto* orbit = app.add_subcommand("orbit", "closed-orbit constructions and search");
  orbit->require_subcommand(1);
  std::int64_t oc_d = 2;
  auto* oc = orbit->add_subcommand("compact", "compact orbit from a real quadratic order");
  oc->add_option("--D", oc_d, "squarefree D >= 2")->required();
  std::string os_spec;
  bool os_trace = false;
  auto* os = orbit->add_subcommand("search", "search the orbit for a well-rounded lattice");
  os->add_option("spec", os_spec, "orbit spec JSON file")->required();
  os->add_flag("--trace", os_trace, "record a (a, spread) trace CSV");

  // flag
  std::string flag_file;
  auto* fl = app.add_subcommand("flag", "nested multi-indices and codimension of a flag");
  fl->add_option("flag", flag_file, "flag JSON file {n, rows}")->required();

  // stab
  std::string stab_file;
  auto* st = app.add_subcommand("stab", "stabilizer subspace of a support set");
  st->add_option("supports", stab_file, "JSON file {n, supports}")->required();

  // cover (certify | unfold)
  auto* cover = app.add_subcommand("cover", "cover analysis");
  cover->require_subcommand(1);
  std::string cc_file;
  bool cc_no_hyp = false;
  auto* cc = cover->add_subcommand("certify", "multiplicity certification / KKM check");
  cc->add_option("cover", cc_file, "cover JSON file")->required();
  cc->add_flag("--no-hypotheses", cc_no_hyp, "skip hypothesis checking");
  std::string cu_file, cu_window;
  int cu_res = 32;
  auto* cu = cover->add_subcommand("unfold", "pull a cover back through the CFK folding map");
  cu->add_option("cover", cu_file, "cover JSON file")->required();
  cu->add_option("--window", cu_window, "window as lo1,..,lod;hi1,..,hid")->required();
  cu->add_option("--resolution", cu_res, "window grid resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    // Config file fills anything not set on the command line.
    if (!config_path.empty()) {
      json jc;
      try {
        jc = json::parse(read_file(config_path));
      } catch (const json::exception& e) {
        throw CliError(1, std::string("bad config: ") + e.what());
      }
      if (!*opt_seed && jc.contains("seed")) cfg.seed = jc["seed"].get<std::uint64_t>();
      if (!*opt_budget && jc.contains("budget")) cfg.budget = jc["budget"].get<std::uint64_t>();
      if (jc.contains("tolerances")) {
        const auto& t = jc["tolerances"];
        if (!*opt_rank_tol && t.contains("rank_tol")) cfg.rank_tol = t["rank_tol"].get<double>();
        if (!*opt_geom_tol && t.contains("geom_tol")) cfg.geom_tol = t["geom_tol"].get<double>();
        if (!*opt_eta && t.contains("eta_margin")) cfg.eta_margin = t["eta_margin"].get<double>();
      }
      if (!*opt_outdir && jc.contains("output_dir"))
        cfg.output_dir = jc["output_dir"].get<std::string>();
      if (!*opt_format && jc.contains("format")) cfg.format = jc["format"].get<std::string>();
    }
    if (cfg.budget < 100) throw CliError(1, "budget must be at least 100");
    if (cfg.rank_tol <= 0 || cfg.geom_tol <= 0 || cfg.eta_margin <= 0)
      throw CliError(1, "tolerances must be positive");

    if (*svp) {
      LatticeHandle x;
      check(wr_lattice_from_json(read_file(svp_file).c_str(), &x.ptr));
      char* rep = nullptr;
      check(wr_short_vectors(x.ptr, svp_delta, svp_enum_budget, &rep));
      emit(cfg, "svp", take(rep));
      return 0;
    }

    if (*wrc) {
      LatticeHandle x;
      check(wr_lattice_from_json(read_file(wr_file).c_str(), &x.ptr));
      int rounded = 0;
      check(wr_is_well_rounded(x.ptr, wr_tol, &rounded));
      json out;
      out["well_rounded"] = rounded != 0;
      if (wr_generic && rounded) {
        int generic = 0;
        check(wr_is_generic_well_rounded(x.ptr, wr_tol, &generic));
        out["generic"] = generic != 0;
        if (generic) {
          int rank = 0;
          check(wr_transversality_rank(x.ptr, &rank));
          out["transversality_rank"] = rank;
        }
      }
      emit(cfg, "wr-check", out.dump());
      return 0;
    }

    if (*dd) {
      LatticeHandle x;
      check(wr_lattice_from_json(read_file(dd_file).c_str(), &x.ptr));
      int k = 0;
      check(wr_dim_delta(x.ptr, dd_delta, &k));
      json out;
      out["delta"] = dd_delta;
      out["dim_delta"] = k;
      emit(cfg, "dim-delta", out.dump());
      return 0;
    }

    if (*cm) {
      LatticeHandle x;
      check(wr_lattice_from_json(read_file(cm_file).c_str(), &x.ptr));
      const auto a = parse_csv_doubles(cm_a);
      if (static_cast<int>(a.size()) != wr_lattice_dim(x.ptr))
        throw CliError(1, "--a must have n entries");
      char* rep = nullptr;
      check(wr_cover_membership(x.ptr, a.data(), cm_eps, &rep));
      emit(cfg, "cover-membership", take(rep));
      return 0;
    }

    if (*oc) {
      OrbitHandle o;
      check(wr_orbit_compact_from_quadratic(oc_d, &o.ptr));
      char* rep = nullptr;
      check(wr_orbit_to_json(o.ptr, &rep));
      emit(cfg, "orbit-compact", take(rep));
      return 0;
    }

    if (*os) {
      OrbitHandle o;
      check(wr_orbit_from_spec_json(read_file(os_spec).c_str(), &o.ptr));
      char* rep = nullptr;
      char* trace = nullptr;
      check(wr_orbit_search(o.ptr, cfg.budget, cfg.seed, cfg.geom_tol, &rep,
                            os_trace ? &trace : nullptr));
      const std::string rep_s = take(rep);
      const std::string trace_s = os_trace ? take(trace) : "";
      emit(cfg, "orbit-search", rep_s, trace_s, "trace");
      const auto parsed = json::parse(rep_s);
      const double spread = parsed["spread"].get<double>();
      return (spread - 1.0 <= cfg.geom_tol) ? 0 : 3;
    }

    if (*fl) {
      char* rep = nullptr;
      check(wr_flag_analyze(read_file(flag_file).c_str(), &rep));
      emit(cfg, "flag", take(rep));
      return 0;
    }

    if (*st) {
      char* rep = nullptr;
      check(wr_stabilizer_subspace(read_file(stab_file).c_str(), &rep));
      emit(cfg, "stab", take(rep));
      return 0;
    }

    if (*cc) {
      CoverHandle c;
      check(wr_cover_from_json(read_file(cc_file).c_str(), &c.ptr));
      char* rep = nullptr;
      char* heat = nullptr;
      check(wr_cover_certify(c.ptr, cc_no_hyp ? 0 : 1, &rep, &heat));
      const std::string rep_s = take(rep);
      emit(cfg, "cover-certify", rep_s, take(heat), "multiplicity");
      const auto parsed = json::parse(rep_s);
      if (parsed.value("violated", false)) return 4;
      if (parsed.contains("satisfied") && !parsed["satisfied"].get<bool>()) return 4;
      return 0;
    }

    if (*cu) {
      CoverHandle c;
      check(wr_cover_from_json(read_file(cu_file).c_str(), &c.ptr));
      const auto semi = cu_window.find(';');
      if (semi == std::string::npos) throw CliError(1, "--window needs lo...;hi...");
      auto lo = parse_csv_doubles(cu_window.substr(0, semi));
      auto hi = parse_csv_doubles(cu_window.substr(semi + 1));
      if (lo.size() != hi.size()) throw CliError(1, "window lo/hi lengths differ");
      std::vector<double> window = lo;
      window.insert(window.end(), hi.begin(), hi.end());
      char* rep = nullptr;
      check(wr_cover_unfold(c.ptr, window.data(), cu_res, &rep));
      emit(cfg, "cover-unfold", take(rep));
      return 0;
    }

    throw CliError(1, "no subcommand selected");
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
