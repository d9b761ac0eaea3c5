#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = HBPRM_CLI_PATH;

struct CmdResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hbprm_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CmdResult run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path out = workdir / "_stdout.txt";
  const fs::path err = workdir / "_stderr.txt";
  const std::string cmd = "cd '" + workdir.string() + "' && '" + kCli + "' " +
                          args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_all(out);
  r.err = read_all(err);
  return r;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("gen writes dataset and truth files deterministically") {
  const auto dir = fresh_dir("gen");
  const std::string args =
      "gen --family large --groups 3 --per-group 5 --covariates 2 --seed 42 "
      "--name t";
  const auto r1 = run_cli(args + " --output-dir a", dir);
  INFO(r1.err);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out.find("generated t") != std::string::npos);
  CHECK(r1.out.find("N_d=15") != std::string::npos);
  REQUIRE(fs::exists(dir / "a" / "t.csv"));
  REQUIRE(fs::exists(dir / "a" / "t_truth.csv"));
  const auto r2 = run_cli(args + " --output-dir b", dir);
  REQUIRE(r2.exit_code == 0);
  CHECK(read_all(dir / "a" / "t.csv") == read_all(dir / "b" / "t.csv"));
  CHECK(read_all(dir / "a" / "t_truth.csv") ==
        read_all(dir / "b" / "t_truth.csv"));
  // header: group,x1,x2,x3,y (two random columns plus the scale column)
  const std::string text = read_all(dir / "a" / "t.csv");
  CHECK(text.rfind("group,x1,x2,x3,y\n", 0) == 0);
  CHECK(count_lines(text) == 16);
}

TEST_CASE("fit produces draws and diagnostics; draws are rerun-identical") {
  const auto dir = fresh_dir("fit");
  REQUIRE(run_cli("gen --family large --groups 3 --per-group 5 --covariates 1 "
                  "--seed 7 --name d --output-dir .",
                  dir)
              .exit_code == 0);
  const std::string fit_args =
      "fit --input d.csv --sampler ags --chains 2 --warmup 50 --keep 50 "
      "--seed 11 --init zeros";
  const auto r1 = run_cli(fit_args + " --output-dir f1", dir);
  INFO(r1.err);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out.find("sampler ags") != std::string::npos);
  CHECK(r1.out.find("T_s=") != std::string::npos);
  REQUIRE(fs::exists(dir / "f1" / "d_ags_draws.csv"));
  REQUIRE(fs::exists(dir / "f1" / "d_ags_diagnostics.csv"));
  const auto r2 = run_cli(fit_args + " --output-dir f2", dir);
  REQUIRE(r2.exit_code == 0);
  CHECK(read_all(dir / "f1" / "d_ags_draws.csv") ==
        read_all(dir / "f2" / "d_ags_draws.csv"));
  // draws file: header + chains * keep * (J*K + 2K) rows
  CHECK(count_lines(read_all(dir / "f1" / "d_ags_draws.csv")) ==
        1 + 2 * 50 * (3 * 2 + 2 * 2));

  const auto rm = run_cli(
      "fit --input d.csv --sampler mwg --chains 2 --warmup 200 --keep 50 "
      "--seed 11 --init zeros --output-dir fm",
      dir);
  INFO(rm.err);
  REQUIRE(rm.exit_code == 0);
  CHECK(rm.out.find("accept rate") != std::string::npos);
  CHECK(fs::exists(dir / "fm" / "d_mwg_draws.csv"));
}

TEST_CASE("fit honors the scalar backend flag") {
  const auto dir = fresh_dir("backend");
  REQUIRE(run_cli("gen --groups 2 --per-group 4 --covariates 1 --seed 3 "
                  "--name d --output-dir .",
                  dir)
              .exit_code == 0);
  const auto r = run_cli(
      "fit --input d.csv --backend scalar --chains 2 --warmup 20 --keep 20 "
      "--seed 1 --init zeros --output-dir .",
      dir);
  INFO(r.err);
  CHECK(r.exit_code == 0);
}

TEST_CASE("compare requires a seed and writes the comparison table") {
  const auto dir = fresh_dir("compare");
  REQUIRE(run_cli("gen --groups 2 --per-group 5 --covariates 1 --seed 9 "
                  "--name d --output-dir .",
                  dir)
              .exit_code == 0);
  const auto missing = run_cli("compare --input d.csv --chains 2 --warmup 20 "
                               "--keep 20 --output-dir .",
                               dir);
  CHECK(missing.exit_code != 0);
  CHECK(missing.err.find("--seed") != std::string::npos);

  const auto r = run_cli(
      "compare --input d.csv --chains 2 --warmup 50 --keep 30 --seed 4 "
      "--init zeros --output-dir .",
      dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("standing in for the NUTS results") != std::string::npos);
  REQUIRE(fs::exists(dir / "d_compare.csv"));
  const std::string table = read_all(dir / "d_compare.csv");
  CHECK(count_lines(table) == 3);
  CHECK(table.find("ags") != std::string::npos);
  CHECK(table.find("mwg") != std::string::npos);
  CHECK(fs::exists(dir / "d_ags_draws.csv"));
  CHECK(fs::exists(dir / "d_mwg_draws.csv"));
}

TEST_CASE("ks-curve writes the decay table") {
  const auto dir = fresh_dir("ks");
  const auto r = run_cli("ks-curve --output-dir .", dir);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("non-increasing over y in {1,2,3,5,10,20}: yes") !=
        std::string::npos);
  const std::string text = read_all(dir / "ks_curve.csv");
  CHECK(text.rfind("y,ks_distance,abs_mean_error\n", 0) == 0);
  CHECK(count_lines(text) == 7);
  CHECK(text.find("\n1,0.070699889538354377,") != std::string::npos);
  CHECK(text.find("\n20,0.014958540180892377,") != std::string::npos);

  const auto bad = run_cli("ks-curve --points 1024 --output-dir .", dir);
  CHECK(bad.exit_code != 0);
  CHECK(bad.err.find("4096") != std::string::npos);
}

TEST_CASE("missing input fails with a clear error") {
  const auto dir = fresh_dir("missing");
  const auto r = run_cli("fit --input nope.csv --seed 1", dir);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("nope.csv") != std::string::npos);
}

TEST_CASE("zero counts point the user at --shift-counts") {
  const auto dir = fresh_dir("zeros");
  REQUIRE(run_cli("gen --family small --groups 2 --per-group 10 "
                  "--covariates 1 --seed 1 --name z --output-dir .",
                  dir)
              .exit_code == 0);
  const auto fail = run_cli(
      "fit --input z.csv --chains 2 --warmup 20 --keep 20 --seed 2", dir);
  CHECK(fail.exit_code == 1);
  CHECK(fail.err.find("counts must be positive") != std::string::npos);
  CHECK(fail.err.find("--shift-counts") != std::string::npos);

  const auto ok = run_cli(
      "fit --input z.csv --shift-counts 1 --chains 2 --warmup 20 --keep 20 "
      "--seed 2 --init zeros --output-dir .",
      dir);
  INFO(ok.err);
  CHECK(ok.exit_code == 0);
}

TEST_CASE("output dir resolution: flag beats environment beats default") {
  const auto dir = fresh_dir("envdir");
  fs::create_directories(dir / "env_target");
  setenv("HBPRM_OUTPUT_DIR", (dir / "env_target").string().c_str(), 1);
  const std::string args =
      "gen --groups 2 --per-group 3 --covariates 1 --seed 5 --name e";
  // no flag: the environment override wins
  REQUIRE(run_cli(args, dir).exit_code == 0);
  CHECK(fs::exists(dir / "env_target" / "e.csv"));
  CHECK(!fs::exists(dir / "e.csv"));
  // explicit flag: beats the environment
  REQUIRE(run_cli(args + " --output-dir flag_target", dir).exit_code == 0);
  CHECK(fs::exists(dir / "flag_target" / "e.csv"));
  unsetenv("HBPRM_OUTPUT_DIR");
  // neither: current directory
  REQUIRE(run_cli(args, dir).exit_code == 0);
  CHECK(fs::exists(dir / "e.csv"));
}

TEST_CASE("config file supplies defaults but the environment overrides it") {
  const auto dir = fresh_dir("config");
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "[gen]\noutput-dir = cfg_target\nseed = 5\n";
  }
  const std::string args =
      "--config run.ini gen --groups 2 --per-group 3 --covariates 1 --name c";
  REQUIRE(run_cli(args, dir).exit_code == 0);
  CHECK(fs::exists(dir / "cfg_target" / "c.csv"));

  fs::create_directories(dir / "env_target");
  setenv("HBPRM_OUTPUT_DIR", (dir / "env_target").string().c_str(), 1);
  REQUIRE(run_cli(args, dir).exit_code == 0);
  CHECK(fs::exists(dir / "env_target" / "c.csv"));
  unsetenv("HBPRM_OUTPUT_DIR");
}
