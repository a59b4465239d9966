#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "quditfuse_cli/cli.hpp"
#include "report_compare.hpp"

namespace fs = std::filesystem;
using namespace quditfuse;
using namespace quditfuse::cli;

namespace {

const fs::path kData = QUDITFUSE_TEST_DATA_DIR;
const fs::path kConfigs = QUDITFUSE_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("quditfuse_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "quditfuse");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f);
  return json::parse(f);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("qubit preset: relevant rows sum to one half with ln 2 entropy") {
  const fs::path out = scratch("pbs");
  REQUIRE(invoke({"fuse", "--config", (kConfigs / "qubit_fusion.json").string(), "--out", out.string()}) == kExitOk);

  const json report = read_json(out / "fuse_report.json");
  CHECK(report["tool"] == "quditfuse");
  CHECK(report["command"] == "fuse");
  CHECK(report["version"] == version());
  double relevant = 0.0;
  for (const auto& o : report["outcomes"]) {
    if (!o["relevant"].get<bool>()) continue;
    relevant += o["probability"].get<double>();
    if (o["probability"].get<double>() > 0) CHECK(std::abs(o["entropy"].get<double>() - std::log(2.0)) < 1e-9);
  }
  CHECK(std::abs(relevant - 0.5) < 1e-10);
  CHECK(std::abs(report["summary"]["total_probability"].get<double>() - 1.0) < 1e-10);

  const auto csv = read_csv(out / "fuse_outcomes.csv");
  REQUIRE(csv.size() == 11);
  CHECK(csv[0][0] == "pattern");
  double csv_relevant = 0.0;
  for (std::size_t i = 1; i < csv.size(); ++i) {
    if (csv[i][2] == "1") csv_relevant += std::stod(csv[i][1]);
  }
  CHECK(std::abs(csv_relevant - 0.5) < 1e-10);
}

TEST_CASE("identity unitary gives only product heralds") {
  const fs::path out = scratch("identity");
  REQUIRE(invoke({"fuse", "--config", (kConfigs / "qutrit_identity.json").string(), "--out", out.string()}) == kExitOk);
  const json report = read_json(out / "fuse_report.json");
  int heralded_relevant = 0;
  for (const auto& o : report["outcomes"]) {
    if (!o["relevant"].get<bool>() || !o["heralded"].get<bool>()) continue;
    ++heralded_relevant;
    CHECK(o["rank"] == 1);
  }
  CHECK(heralded_relevant > 0);
}

TEST_CASE("qutrit fusion never heralds rank 3") {
  const fs::path out = scratch("qutrit");
  REQUIRE(invoke({"fuse", "--config", (kConfigs / "qutrit_haar.json").string(), "--out", out.string()}) == kExitOk);
  const json report = read_json(out / "fuse_report.json");
  int max_rank = 0;
  for (const auto& o : report["outcomes"]) max_rank = std::max(max_rank, o["rank"].get<int>());
  CHECK(max_rank == 2);
}

TEST_CASE("dits rescale the entropy column by ln d") {
  const fs::path nats = scratch("nats");
  const fs::path dits = scratch("dits");
  const std::string cfg = (kConfigs / "qutrit_haar.json").string();
  REQUIRE(invoke({"fuse", "--config", cfg, "--out", nats.string()}) == kExitOk);
  REQUIRE(invoke({"fuse", "--config", cfg, "--out", dits.string(), "--entropy-units", "dits"}) == kExitOk);
  const auto a = read_csv(nats / "fuse_outcomes.csv");
  const auto b = read_csv(dits / "fuse_outcomes.csv");
  REQUIRE(a.size() == b.size());
  CHECK(a[0][5] == "entropy_nats");
  CHECK(b[0][5] == "entropy_dits");
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(std::abs(std::stod(a[i][5]) / std::log(3.0) - std::stod(b[i][5])) < 1e-14);
  }
  // the JSON report keeps nats either way
  CHECK(read_json(nats / "fuse_report.json")["outcomes"] == read_json(dits / "fuse_report.json")["outcomes"]);
}

TEST_CASE("format flag selects outputs") {
  const fs::path out = scratch("format");
  const std::string cfg = (kConfigs / "qubit_fusion.json").string();
  REQUIRE(invoke({"fuse", "--config", cfg, "--out", out.string(), "--format", "csv"}) == kExitOk);
  CHECK(fs::exists(out / "fuse_outcomes.csv"));
  CHECK_FALSE(fs::exists(out / "fuse_report.json"));
  fs::remove_all(out);
  REQUIRE(invoke({"fuse", "--config", cfg, "--out", out.string(), "--format", "json"}) == kExitOk);
  CHECK(fs::exists(out / "fuse_report.json"));
  CHECK_FALSE(fs::exists(out / "fuse_outcomes.csv"));
}

TEST_CASE("config errors exit with code 2") {
  const fs::path out = scratch("errors");
  for (const char* name : {"unknown_key.json", "bad_type.json", "bad_leg.json", "missing.json"}) {
    CAPTURE(name);
    CHECK(invoke({"fuse", "--config", (kData / name).string(), "--out", out.string()}) == kExitConfig);
  }
  CHECK(invoke({"fuse", "--out", out.string()}) == kExitConfig);
  CHECK(invoke({"fuse", "--config", (kConfigs / "qubit_fusion.json").string(), "--format", "xml"}) == kExitConfig);
  CHECK(invoke({"nonsense"}) == kExitConfig);
  CHECK(invoke({"verify", "--trials", "0", "--out", out.string()}) == kExitConfig);

  CHECK_THROWS_AS(ScenarioConfig::from_json(json::parse(R"({"d": 2, "clusters": []})")), ConfigError);
  CHECK_THROWS_AS(VerifyConfig::from_json(json::parse(R"({"d": [], "trials": 5})")), ConfigError);
  CHECK_THROWS_AS(VerifyConfig::from_json(json::parse(R"({"d": [3], "extra": 1})")), ConfigError);
}

TEST_CASE("report of another command is rejected as config") {
  const fs::path out = scratch("wrongcmd");
  REQUIRE(invoke({"fuse", "--config", (kConfigs / "qubit_fusion.json").string(), "--out", out.string()}) == kExitOk);
  CHECK(invoke({"optimize", "--config", (out / "fuse_report.json").string(), "--out", out.string()}) == kExitConfig);
}

TEST_CASE("verify passes on the theorem sweep and fails on a corrupted density") {
  const fs::path out = scratch("verify");
  REQUIRE(invoke({"verify", "--config", (kData / "verify_small.json").string(), "--out", out.string()}) == kExitOk);
  const json report = read_json(out / "verify_report.json");
  CHECK(report["summary"]["violations"] == 0);
  CHECK(report["outcomes"].size() == 4);
  CHECK(fs::exists(out / "verify_outcomes.csv"));

  const fs::path bad = scratch("verify_fault");
  CHECK(invoke({"verify", "--config", (kData / "verify_small.json").string(), "--out", bad.string(), "--inject-fault",
                "rho"}) == kExitViolation);
  const json faulty = read_json(bad / "verify_report.json");
  REQUIRE(!faulty["violations"].empty());
  const json& v = faulty["violations"][0];
  CHECK(v.contains("trial_seed"));
  CHECK(v.contains("trial"));
  CHECK(v.contains("pattern"));
}

TEST_CASE("verify default sweep over d = 2..4 and 0..2 ancillae holds") {
  const fs::path out = scratch("verify_all");
  CHECK(invoke({"verify", "--config", (kConfigs / "verify_all.json").string(), "--out", out.string()}) == kExitOk);
}

TEST_CASE("optimize writes result, trace and unitary") {
  const fs::path out = scratch("optimize");
  REQUIRE(invoke({"optimize", "--config", (kData / "optimize_small.json").string(), "--out", out.string()}) ==
          kExitOk);
  const json report = read_json(out / "optimize_report.json");
  const json& result = report["result"];
  CHECK(result["best_value"].get<double>() > 0.0);
  CHECK(result["best_value"].get<double>() <= 0.5 + 1e-9);
  CHECK(result["best_unitary"].size() == 4);
  const auto trace = read_csv(out / "optimize_trace.csv");
  REQUIRE(trace.size() > 1);
  CHECK(trace[0] == std::vector<std::string>{"evaluation", "value"});
  CHECK(fs::exists(out / "best_unitary.txt"));
  CHECK(fs::exists(out / "optimize_outcomes.csv"));
}

TEST_CASE("qutrit full-entanglement optimization stays at zero") {
  const fs::path out = scratch("optimize_d3");
  REQUIRE(invoke({"optimize", "--config", (kData / "qutrit_full.json").string(), "--out", out.string()}) == kExitOk);
  CHECK(read_json(out / "optimize_report.json")["result"]["best_value"].get<double>() < 1e-6);
}

TEST_CASE("tradeoff with five thresholds gives a five-row table") {
  const fs::path out = scratch("tradeoff");
  REQUIRE(invoke({"optimize", "--config", (kConfigs / "tradeoff_qutrit.json").string(), "--out", out.string()}) ==
          kExitOk);
  const auto csv = read_csv(out / "tradeoff.csv");
  REQUIRE(csv.size() == 6);
  CHECK(csv[0] == std::vector<std::string>{"threshold", "best_value"});
}

TEST_CASE("haar-scan is seeded") {
  const fs::path a = scratch("scan_a");
  const fs::path b = scratch("scan_b");
  const std::string cfg = (kConfigs / "qutrit_haar.json").string();
  REQUIRE(invoke({"haar-scan", "--config", cfg, "--trials", "8", "--out", a.string()}) == kExitOk);
  REQUIRE(invoke({"haar-scan", "--config", cfg, "--trials", "8", "--out", b.string()}) == kExitOk);
  const json ra = read_json(a / "haar_scan_report.json");
  CHECK(ra["outcomes"].size() == 8);
  CHECK(qf_test::max_numeric_diff(ra, read_json(b / "haar_scan_report.json")) == 0.0);
}

TEST_CASE("rerunning an emitted report reproduces it") {
  struct Case {
    std::string command;
    fs::path config;
  };
  const std::vector<Case> cases = {
      {"fuse", kConfigs / "ququart_ancilla.json"},
      {"verify", kData / "verify_small.json"},
      {"optimize", kData / "optimize_small.json"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.command);
    const fs::path first = scratch("repro_first_" + c.command);
    const fs::path second = scratch("repro_second_" + c.command);
    REQUIRE(invoke({c.command, "--config", c.config.string(), "--out", first.string()}) == kExitOk);
    const fs::path report = first / (c.command + "_report.json");
    REQUIRE(invoke({c.command, "--config", report.string(), "--out", second.string()}) == kExitOk);
    std::string where;
    const double diff = qf_test::max_numeric_diff(read_json(report), read_json(second / report.filename()), &where);
    CAPTURE(where);
    CHECK(diff <= 1e-12);
  }
}

TEST_CASE("seed override changes the haar unitary") {
  const fs::path a = scratch("seed_a");
  const fs::path b = scratch("seed_b");
  const std::string cfg = (kConfigs / "ququart_ancilla.json").string();
  REQUIRE(invoke({"fuse", "--config", cfg, "--out", a.string()}) == kExitOk);
  REQUIRE(invoke({"fuse", "--config", cfg, "--seed", "6", "--out", b.string()}) == kExitOk);
  const json ra = read_json(a / "fuse_report.json");
  const json rb = read_json(b / "fuse_report.json");
  CHECK(rb["seed"] == 6);
  CHECK(qf_test::max_numeric_diff(ra["unitary"], rb["unitary"]) > 1e-3);
}
