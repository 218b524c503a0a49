// Smoke tests that drive the installed binary as a subprocess.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "pnnkit_cli_test.log";
  const std::string cmd =
      std::string(PNNKIT_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
#ifdef _WIN32
  r.exit_code = status;
#else
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
  std::ifstream is(log);
  std::ostringstream ss;
  ss << is.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("paramcount reports the default geometry") {
  const fs::path out = fresh_dir("pnnkit_cli_paramcount");
  const CliResult r = run_cli("paramcount --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("hidden_weights=9980400") != std::string::npos);
  CHECK(fs::exists(out / "stamp.txt"));
  fs::remove_all(out);
}

TEST_CASE("paramcount supports the comparison architecture") {
  const fs::path out = fresh_dir("pnnkit_cli_paramcount_vdnn");
  const CliResult r = run_cli("paramcount --arch vdnn --k 64 --depth 2 --out " +
                              out.string());
  CHECK(r.exit_code == 0);
  // 64*32 + 32*16 hidden weights.
  CHECK(r.output.find("hidden_weights=2560") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("missing config file exits 1 and names the path") {
  const fs::path out = fresh_dir("pnnkit_cli_badcfg");
  const CliResult r = run_cli("paramcount --config /nonexistent/cfg.txt --out " +
                              out.string());
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("/nonexistent/cfg.txt") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("unknown flag exits 1") {
  const CliResult r = run_cli("paramcount --no-such-flag 3");
  CHECK(r.exit_code == 1);
}

TEST_CASE("config file values apply below command-line flags") {
  const fs::path out = fresh_dir("pnnkit_cli_cfg");
  const fs::path cfg = out / "cfg.txt";
  {
    std::ofstream os(cfg);
    os << "# comment\n";
    os << "hd = 2\n";
    os << "depth = 1\n";
    os << "k = 8\n";
  }
  const CliResult file_only =
      run_cli("paramcount --config " + cfg.string() + " --out " + out.string());
  CHECK(file_only.exit_code == 0);
  CHECK(file_only.output.find("hidden_weights=16") != std::string::npos);

  const CliResult with_flag = run_cli("paramcount --config " + cfg.string() +
                                      " --hd 4 --out " + out.string());
  CHECK(with_flag.output.find("hidden_weights=32") != std::string::npos);

  {
    std::ofstream os(cfg, std::ios::app);
    os << "bogus = 1\n";
  }
  const CliResult bad =
      run_cli("paramcount --config " + cfg.string() + " --out " + out.string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("bogus") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("synth / split / train / eval / mask end to end") {
  const fs::path root = fresh_dir("pnnkit_cli_e2e");
  const std::string common =
      " --k 64 --classes 3 --seed 4 --snr-db 20"
      " --samples-per-class 8 --signal-length 256";

  const CliResult synth =
      run_cli("synth --out " + (root / "data").string() + common);
  REQUIRE(synth.exit_code == 0);
  REQUIRE(fs::exists(root / "data" / "manifest.txt"));
  CHECK(fs::exists(root / "data" / "bands.txt"));

  const CliResult sp = run_cli("split --ratio 0.5 --out " +
                               (root / "split").string() + " " +
                               (root / "data" / "manifest.txt").string());
  REQUIRE(sp.exit_code == 0);
  CHECK(sp.output.find("train=12 test=12") != std::string::npos);

  const CliResult tr = run_cli(
      "train --hd 4 --depth 2 --epochs 3 --batch 4 --k 64 --out " +
      (root / "run").string() + " " + (root / "split" / "train.txt").string());
  REQUIRE(tr.exit_code == 0);
  REQUIRE(fs::exists(root / "run" / "model.pnn"));
  CHECK(fs::exists(root / "run" / "history.txt"));

  const CliResult ev = run_cli("eval --out " + (root / "eval").string() + " " +
                               (root / "run" / "model.pnn").string() + " " +
                               (root / "split" / "test.txt").string());
  REQUIRE(ev.exit_code == 0);
  CHECK(ev.output.find("accuracy = ") != std::string::npos);
  CHECK(fs::exists(root / "eval" / "report.txt"));

  const CliResult mk = run_cli("mask --mask-size 16 --out " +
                               (root / "mask").string() + " " +
                               (root / "run" / "model.pnn").string() + " " +
                               (root / "split" / "test.txt").string());
  REQUIRE(mk.exit_code == 0);
  CHECK(fs::exists(root / "mask" / "mask.txt"));

  // A truncated model file is a format error, not a crash.
  const fs::path broken = root / "broken.pnn";
  fs::copy_file(root / "run" / "model.pnn", broken);
  fs::resize_file(broken, 16);
  const CliResult bad = run_cli("eval --out " + (root / "eval").string() + " " +
                                broken.string() + " " +
                                (root / "split" / "test.txt").string());
  CHECK(bad.exit_code == 1);
  fs::remove_all(root);
}
