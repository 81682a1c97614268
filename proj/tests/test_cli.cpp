#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(STOPCOST_CLI_PATH) + "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (const std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("estimate --format xml").code == 2);
  CHECK(run("estimate --config /nonexistent/none.yaml").code == 2);
  CHECK(run("estimate --samples 0").code == 3);
  CHECK(run("estimate --times 1:2").code == 3);
  CHECK(run("tables nothing").code == 3);
  CHECK(run("xi --order 5").code == 3);
}

TEST_CASE("bad config reports the field") {
  const auto dir = std::filesystem::temp_directory_path() / "stopcost_cli_test";
  std::filesystem::create_directories(dir);
  std::ifstream in(std::string(STOPCOST_CONFIG_DIR) + "/proton_carbon.yaml");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  text.replace(text.find("n_per_dim: 27"), 13, "n_per_dim: 28");
  const auto path = dir / "even.yaml";
  std::ofstream(path) << text;
  const std::string cmd = "'" + std::string(STOPCOST_CLI_PATH) + "' ledger --config '" + path.string() + "' 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (const std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  CHECK(WEXITSTATUS(pclose(p)) == 2);
  CHECK(out.find("cell.n_per_dim") != std::string::npos);
  CHECK(out.find("even grid dimension") != std::string::npos);
}

TEST_CASE("JSON report structure") {
  const auto r = run("estimate --config alpha_hydrogen --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["metadata"]["command"] == "estimate");
  CHECK(j["metadata"]["tool_version"] == "1.0.0");
  CHECK(j["metadata"]["config_hash"].get<std::string>().size() == 16);
  CHECK(j["tables"]["per_time"]["rows"].size() == 10);
  CHECK(j["tables"]["ledger"]["rows"].back()["item"] == "total_per_step");
  CHECK(j["tables"]["ledger"]["rows"].back()["toffolis"] == 24928);
}

TEST_CASE("outputs are deterministic") {
  for (const char* args : {"sampling --seed 3 --samples 50", "tables totals", "figures f6-crossover --points 11",
                           "wavepacket-table --sigmas 1,4"}) {
    const auto a = run(args), b = run(args);
    CAPTURE(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
  CHECK(run("sampling --seed 3 --samples 50").out != run("sampling --seed 4 --samples 50").out);
}

TEST_CASE("CSV tables carry metadata and headers") {
  const auto r = run("ledger --config proton_deuterium");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# command: ledger") != std::string::npos);
  CHECK(r.out.find("# table: dominance") != std::string::npos);
  CHECK(r.out.find("label,item,toffolis,note") != std::string::npos);
}

TEST_CASE("output directory from the environment") {
  const auto dir = std::filesystem::temp_directory_path() / "stopcost_cli_out";
  std::filesystem::remove_all(dir);
  const auto r = run("tables wavepacket --format json", "STOPCOST_OUTPUT_DIR='" + dir.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const auto file = dir / "table_wavepacket.json";
  REQUIRE(std::filesystem::exists(file));
  std::ifstream in(file);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["tables"]["wavepacket"]["rows"].size() == 4);
}

TEST_CASE("sigma warning") {
  const auto dir = std::filesystem::temp_directory_path() / "stopcost_cli_test";
  std::filesystem::create_directories(dir);
  std::ifstream in(std::string(STOPCOST_CONFIG_DIR) + "/proton_carbon.yaml");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  text.replace(text.find("sigma_k: 6.0"), 12, "sigma_k: 2.0");
  const auto path = dir / "narrow.yaml";
  std::ofstream(path) << text;
  const auto r = run("estimate --config '" + path.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("# warning:") != std::string::npos);
}

TEST_CASE("every subcommand runs") {
  for (const char* args : {"tables lambda", "tables ledger", "figures f2-wavepacket --max-bits 5", "figures f3-norms --etas 2,5",
                           "figures f5a-time", "figures f5b-eta", "figures f8-precision", "ko-crossover --points 5",
                           "xi --grid 2 --eta 2 --omega 5", "invsqrt-verify --points 1000 --quantized",
                           "wavepacket-curve --sigmas 2 --max-bits 5", "estimate --method pf8 --format pretty"}) {
    CAPTURE(args);
    CHECK(run(args).code == 0);
  }
}
