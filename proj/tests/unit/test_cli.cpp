#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "multisum/cli.hpp"
#include "multisum/json_io.hpp"

using namespace multisum;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path config_dir() { return fs::path(MULTISUM_CONFIG_DIR); }

fs::path fresh_dir(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("multisum_cli_" + tag);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CommandResult run(const std::string& sub, const std::string& cfg, const fs::path& out, unsigned workers = 1) {
  CliOptions o;
  o.config = config_dir() / cfg;
  o.out = out;
  o.workers = workers;
  return run_command(sub, o);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("bound on the rank-one Hermite kernel") {
    auto out = fresh_dir("bound");
    auto r = run("bound", "bound_rank1.json", out);
    REQUIRE(r.exit_code == kExitOk);
    REQUIRE(r.files.count("bound_table"));
    REQUIRE(r.files.count("bound_report"));
    auto csv = slurp(out / r.files.at("bound_table"));
    CHECK(csv.rfind("p,route,M*,value,l_size\n", 0) == 0);
    CHECK(csv.find("\n2,klesov_product,-,1,1\n") != std::string::npos);
    CHECK(csv.find("\n2,dp_quasinorm,-,1,1\n") != std::string::npos);

    auto rep = read_json_file(out / r.files.at("bound_report"));
    int w_rows = 0;
    for (const auto& row : rep.at("rows")) {
      if (row.at("route") != "theorem_W") continue;
      ++w_rows;
      // rank one: a single component is enough
      CHECK(row.at("M_star").get<int>() == 1);
    }
    CHECK(w_rows == 6);
    CHECK(fs::exists(out / "manifest.json"));
  }

  TEST_CASE("configuration errors exit with code 2 and a JSON error") {
    auto out = fresh_dir("err");
    CliOptions o;
    o.out = out;
    Json no_seed = {{"kernel", {{"factors", {"hermite"}}, {"terms", {{{"k", {1}}, {"w", 1.0}}}}}},
                    {"p_grid", {2}}};
    auto r = run_command_json("bound", no_seed, ".", o);
    CHECK(r.exit_code == kExitConfig);
    auto e = parse_json_text(r.error_json, "error");
    CHECK(e.at("error").at("kind") == "config_error");
    CHECK(r.error_json.find("seed") != std::string::npos);

    Json extra = no_seed;
    extra["seed"] = 1;
    extra["bogus_key"] = 3;
    r = run_command_json("bound", extra, ".", o);
    CHECK(r.exit_code == kExitConfig);
    CHECK(r.error_json.find("bogus_key") != std::string::npos);

    r = run_command_json("frobnicate", extra, ".", o);
    CHECK(r.exit_code == kExitConfig);

    o.config = out / "does_not_exist.json";
    r = run_command("bound", o);
    CHECK(r.exit_code == kExitConfig);
  }

  TEST_CASE("reruns and worker counts give byte-identical files") {
    auto a = fresh_dir("det_a"), b = fresh_dir("det_b"), c = fresh_dir("det_c");
    auto ra = run("simulate", "simulate_orthonormal.json", a, 1);
    auto rb = run("simulate", "simulate_orthonormal.json", b, 1);
    auto rc = run("simulate", "simulate_orthonormal.json", c, 4);
    REQUIRE(ra.exit_code == kExitOk);
    CHECK(ra.files == rb.files);
    CHECK(ra.files == rc.files);
    for (const auto& [role, name] : ra.files) {
      CHECK(slurp(a / name) == slurp(b / name));
      CHECK(slurp(a / name) == slurp(c / name));
    }
  }

  TEST_CASE("seed override changes the samples") {
    auto a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
    CliOptions o;
    o.config = config_dir() / "simulate_orthonormal.json";
    o.out = a;
    auto ra = run_command("simulate", o);
    o.out = b;
    o.seed_override = 99;
    auto rb = run_command("simulate", o);
    REQUIRE(ra.exit_code == kExitOk);
    REQUIRE(rb.exit_code == kExitOk);
    CHECK(ra.files.at("samples_L1") != rb.files.at("samples_L1"));
  }

  TEST_CASE("simulate: variance matches sigma^2 and N = 1 is quick") {
    auto out = fresh_dir("sim");
    auto r = run("simulate", "simulate_orthonormal.json", out);
    REQUIRE(r.exit_code == kExitOk);
    CHECK(r.files.count("limit"));
    CHECK(r.files.count("quantiles_L2"));
    auto sum = read_json_file(out / r.files.at("summary"));
    REQUIRE(sum.at("sets").size() == 2);
    for (const auto& s : sum.at("sets")) {
      CHECK(s.at("sigma2").get<double>() == Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(s.at("var_ratio").get<double>() - 1.0) < 0.05);
    }

    Json cfg = read_json_file(config_dir() / "simulate_orthonormal.json");
    cfg["N"] = 1;
    CliOptions o;
    o.out = fresh_dir("sim_one");
    auto t0 = std::chrono::steady_clock::now();
    auto r1 = run_command_json("simulate", cfg, config_dir(), o);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(r1.exit_code == kExitOk);
    CHECK(r1.error_json.empty());
    if (!r1.error_json.empty()) MESSAGE(r1.error_json);
    CHECK(secs < 1.0);
  }

  TEST_CASE("psi tables") {
    auto out = fresh_dir("psi");
    auto r = run("psi", "psi_power_log.json", out);
    REQUIRE(r.exit_code == kExitOk);
    auto table = slurp(out / r.files.at("psi_table"));
    CHECK(table.rfind("function,p,psi,v\n", 0) == 0);
    // extremal r = 3: psi = 1 on [1, 3], so p = 4 is left out
    CHECK(table.find("1:extremal,2,1,0\n") != std::string::npos);
    CHECK(table.find("1:extremal,4,") == std::string::npos);
    auto conj = slurp(out / r.files.at("conjugate"));
    CHECK(conj.find("1:extremal,") != std::string::npos);
    auto tail = slurp(out / r.files.at("tail_bound"));
    CHECK(tail.rfind("function,y,bound\n", 0) == 0);
    int lines = 0;
    for (char ch : tail) lines += ch == '\n';
    CHECK(lines == 1 + 3 * 3);
  }

  TEST_CASE("verify exit codes") {
    auto l = run("verify", "lshape_fixed_fraction.json", fresh_dir("vl"));
    CHECK(l.exit_code == kExitHypotheses);
    CHECK(l.files.count("verdict"));
    auto gdir = fresh_dir("vg");
    auto g = run("verify", "gauss_rank1.json", gdir);
    CHECK(g.exit_code == kExitOk);
    auto v = read_json_file(gdir / g.files.at("verdict"));
    CHECK(v.at("which") == "nclt");
  }
}
