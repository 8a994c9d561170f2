// End-to-end tests of the command-line tool: exit-code contract, file
// formats, config precedence, and byte-identical reruns.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <string>

#include <cmath>
#include <nlohmann/json.hpp>

#include "core/enumeration.hpp"
#include "core/serialization.hpp"

namespace {

std::string g_cli;
std::string g_data;

struct RunOut {
  int code = -1;
  std::string out;
};

RunOut run_cli(const std::string& args, bool raw = false) {
  RunOut r;
  const std::string cmd = (raw ? args : g_cli + " " + args) + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string tmp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

using json = nlohmann::json;

TEST_CASE("svp: report on file input, oracle agreement, parse failure") {
  const auto z3 = run_cli("svp " + g_data + "/lattices/z3.json --delta-max 0.2");
  CHECK(z3.code == 0);
  const auto rep = json::parse(z3.out);
  CHECK(rep["alpha"] == 1.0);
  CHECK(rep["vectors"].size() == 3);

  // library oracle for the disc-2 lattice file
  const auto disc2 = run_cli("svp " + g_data + "/lattices/disc2.json --delta-max 0.5");
  CHECK(disc2.code == 0);
  const auto file_json = wellround::io::parse(
      wellround::io::read_file(g_data + "/lattices/disc2.json"));
  const auto direct = wellround::short_vectors(wellround::io::lattice_from_json(file_json), 0.5);
  CHECK(json::parse(disc2.out)["alpha"].get<double>() ==
        doctest::Approx(direct.alpha).epsilon(1e-12));

  const auto bad = run_cli("svp " + tmp_file("wr_bad.json", "not json"));
  CHECK(bad.code == 1);

  // starved enumeration: exit 2
  const auto starved = run_cli("svp " + g_data + "/lattices/z3.json --delta-max 3.5 --enum-budget 10");
  CHECK(starved.code == 2);
}

TEST_CASE("wr-check and dim-delta") {
  const auto wr = run_cli("wr-check " + g_data + "/lattices/hexagonal.json --generic");
  CHECK(wr.code == 0);
  const auto parsed = json::parse(wr.out);
  CHECK(parsed["well_rounded"] == true);
  CHECK(parsed["generic"] == false);

  const auto dd = run_cli("dim-delta " + g_data + "/lattices/z2.json --delta 0.1");
  CHECK(json::parse(dd.out)["dim_delta"] == 2);
}

TEST_CASE("orbit search exit-code contract") {
  // trivial spec: already well-rounded at a = 0
  const auto trivial = run_cli("orbit search " + g_data + "/orbits/unit2.json --budget 200");
  CHECK(trivial.code == 0);
  const auto parsed = json::parse(trivial.out);
  CHECK(parsed["spread"] == 1.0);
  CHECK(parsed["a_star"][0] == 0.0);

  const auto disc2 = run_cli("orbit search " + g_data + "/orbits/disc2.json --budget 5000");
  CHECK(disc2.code == 0);

  // deliberately starved: tiny budget, unreachable tolerance
  const auto starved = run_cli("orbit search " + g_data +
                               "/orbits/z1_disc2.json --budget 100 --geom-tol 1e-12");
  CHECK(starved.code == 3);
  const auto best = json::parse(starved.out);
  CHECK(best["converged"] == false);
  CHECK(best["spread"].get<double>() >= 1.0);

  const auto bad_spec = run_cli("orbit search " +
                                tmp_file("wr_badspec.json", R"({"blocks":[]})"));
  CHECK(bad_spec.code == 1);
}

TEST_CASE("orbit search results are reproducible by direct library calls") {
  const auto cli = run_cli("orbit search " + g_data + "/orbits/disc3.json --budget 1500 --seed 5");
  CHECK(cli.code == 0);
  const auto spec = wellround::io::parse(
      wellround::io::read_file(g_data + "/orbits/disc3.json"));
  auto [x, s] = wellround::io::orbit_from_spec_json(spec);
  wellround::SearchOptions opts;
  opts.budget = 1500;
  opts.seed = 5;
  opts.target_tol = 1e-6;  // the CLI default geom_tol
  const auto direct = wellround::search_well_rounded(x, s, opts);
  CHECK(wellround::io::search_result_to_json(direct).dump() + "\n" == cli.out);
}

TEST_CASE("byte-identical reruns with a fixed seed") {
  const std::string cmd = "orbit search " + g_data + "/orbits/disc2.json --budget 2000 --seed 11";
  const auto a = run_cli(cmd);
  const auto b = run_cli(cmd);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("cover certify exit codes: pass, violated, parse") {
  const auto kkm = run_cli("cover certify " + g_data + "/covers/kkm_delta2.json");
  CHECK(kkm.code == 0);
  CHECK(json::parse(kkm.out)["order"] == 3);

  const auto tube = run_cli("cover certify " + g_data + "/covers/tube_s1t1.json");
  CHECK(tube.code == 0);
  const auto tube_rep = json::parse(tube.out);
  CHECK(tube_rep["order"] == 3);
  CHECK(tube_rep["hyp_i_ok"] == true);

  // two full tubes: order = s + t with hypotheses formally passing -> exit 4
  const std::string violated = tmp_file("wr_violated.json", R"({
    "domain": {"type":"simplex_box","s":1,"t":1,"rho":1.0,"t_bounds":4.0,"resolution":16},
    "elements": [
      {"label":"t1","boxes":[[[-0.1,-5.0],[0.55,5.0]]]},
      {"label":"t2","boxes":[[[0.45,-5.0],[1.1,5.0]]]}
    ]})");
  const auto v = run_cli("cover certify " + violated);
  CHECK(v.code == 4);
  CHECK(json::parse(v.out)["violated"] == true);

  const std::string gap = tmp_file("wr_gap.json", R"({
    "domain": {"type":"simplex_box","s":1,"t":0,"rho":1.0,"resolution":32},
    "elements": [{"label":"a","boxes":[[[-0.1],[0.4]]]},
                  {"label":"b","boxes":[[[0.6],[1.1]]]}]})");
  CHECK(run_cli("cover certify " + gap).code == 1);

  // false declaration in a KKM file is a validation failure
  const std::string false_decl = tmp_file("wr_falsedecl.json", R"({
    "domain": {"type":"kkm","s1":1,"s2":0,"resolution":32},
    "elements": [{"label":"a","boxes":[[[-0.1],[0.6]]],"misses":[1]},
                  {"label":"b","boxes":[[[0.4],[1.1]]],"misses":[0]}]})");
  CHECK(run_cli("cover certify " + false_decl).code == 1);
}

TEST_CASE("cover unfold: report and window validation") {
  const auto ok = run_cli("cover unfold " + g_data +
                          "/covers/segment_fold.json --window \"-2;2\" --resolution 32");
  CHECK(ok.code == 0);
  const auto rep = json::parse(ok.out);
  CHECK(rep["order"] == rep["source_order"]);

  const auto small = run_cli("cover unfold " + g_data +
                             "/covers/segment_fold.json --window \"-0.5;0.5\"");
  CHECK(small.code == 1);
}

TEST_CASE("orbit compact reports the fundamental-unit generator") {
  const auto r = run_cli("orbit compact --D 5");
  CHECK(r.code == 0);
  const auto parsed = json::parse(r.out);
  // epsilon = 2 + sqrt(5) has norm -1; the generator is log of its square
  CHECK(parsed["t2_stabilizer_gens"][0][0].get<double>() ==
        doctest::Approx(std::log(9.0 + 4.0 * std::sqrt(5.0))).epsilon(1e-9));
  CHECK(parsed["t1_dim"] == 0);
  CHECK(parsed["t2_dim"] == 1);

  CHECK(run_cli("orbit compact --D 12").code == 1);  // not squarefree
}

TEST_CASE("flag and stab subcommands") {
  const auto fl = run_cli("flag " + g_data + "/flags/coordinate3.json");
  CHECK(fl.code == 0);
  const auto parsed = json::parse(fl.out);
  CHECK(parsed["nested"] == json::parse("[[1],[1,2],[1,2,3]]"));

  const auto singular = run_cli(
      "flag " + tmp_file("wr_singular.json", R"({"n":2,"rows":[[1,1],[2,2]]})"));
  CHECK(singular.code == 1);

  const auto stab = run_cli("stab " + g_data + "/supports/line_in_3.json");
  CHECK(stab.code == 0);
  CHECK(json::parse(stab.out)["dimension"] == 1);
}

TEST_CASE("config file precedence: flags beat config beats defaults") {
  const std::string config = tmp_file("wr_config.json", R"({
    "budget": 150, "seed": 3,
    "tolerances": {"geom_tol": 0.5, "rank_tol": 1e-7, "eta_margin": 0.5}
  })");
  // config geom_tol 0.5 makes the starved run "succeed"
  const auto with_config = run_cli("--config " + config + " orbit search " + g_data +
                                   "/orbits/z1_disc2.json");
  CHECK(with_config.code == 0);
  // flag overrides config: tiny tolerance again -> exhaustion
  const auto with_flag = run_cli("--config " + config + " --geom-tol 1e-12 orbit search " +
                                 g_data + "/orbits/z1_disc2.json");
  CHECK(with_flag.code == 3);
  // invalid budget from config is a validation error
  const std::string bad = tmp_file("wr_config_bad.json", R"({"budget": 10})");
  CHECK(run_cli("--config " + bad + " orbit search " + g_data + "/orbits/unit2.json").code == 1);
}

TEST_CASE("thread cap does not change results") {
  const std::string cmd = "cover certify " + g_data + "/covers/tube_s1t1.json";
  const auto two = run_cli("env WELLROUND_THREADS=2 " + g_cli + " " + cmd, /*raw=*/true);
  const auto one = run_cli("env WELLROUND_THREADS=1 " + g_cli + " " + cmd, /*raw=*/true);
  CHECK(one.code == 0);
  CHECK(one.out == two.out);
}

TEST_CASE("csv stdout payload with --format csv") {
  const auto r = run_cli("--format csv orbit search " + g_data +
                         "/orbits/disc2.json --budget 1000 --trace");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t_1,spread\n", 0) == 0);
}

TEST_CASE("output-dir writes report files") {
  const auto dir = std::filesystem::temp_directory_path() / "wr_cli_out";
  std::filesystem::remove_all(dir);
  const auto r = run_cli("--output-dir " + dir.string() + " orbit search " + g_data +
                         "/orbits/disc2.json --budget 2000 --trace");
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir / "orbit-search.json"));
  CHECK(std::filesystem::exists(dir / "trace.csv"));
  const auto c = run_cli("--output-dir " + dir.string() + " cover certify " + g_data +
                         "/covers/lebesgue_t1.json");
  CHECK(c.code == 0);
  CHECK(std::filesystem::exists(dir / "cover-certify.json"));
  CHECK(std::filesystem::exists(dir / "multiplicity.csv"));
}

int main(int argc, char** argv) {
  doctest::Context ctx;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
    } else if (arg == "--data-dir" && i + 1 < argc) {
      g_data = argv[++i];
    }
  }
  if (g_cli.empty() || g_data.empty()) {
    std::fprintf(stderr, "usage: test_cli --cli <binary> --data-dir <dir>\n");
    return 2;
  }
  ctx.applyCommandLine(1, argv);
  return ctx.run();
}
