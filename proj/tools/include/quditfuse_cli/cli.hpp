#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "quditfuse/optimize.hpp"
#include "quditfuse/sweep.hpp"

namespace quditfuse::cli {

using nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
};

/// Schema or semantic problem in a configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UnitarySource {
  enum class Kind { Preset, Haar, File, Identity };
  Kind kind = Kind::Haar;
  std::string preset;  ///< only "qubit-type2-eq8"
  std::optional<std::uint64_t> seed;
  std::filesystem::path path;
};

struct ClusterSpec {
  json graph;  ///< {vertices, edges[, d]} as given
  std::string leg;
};

struct OptimizerSpec {
  std::int64_t budget = 100000;
  int restarts = 8;
  bool search_ancilla_states = false;
  bool start_from_unitary = false;  ///< restart 0 begins at the configured unitary
  double initial_step = 0.5;
  double min_step = 1e-9;
};

/// Scenario file shared by fuse, optimize and haar-scan.
struct ScenarioConfig {
  int d = 2;
  std::vector<ClusterSpec> clusters;
  std::vector<CVector> ancillas;
  int vacuum_pads = 0;
  UnitarySource unitary;
  std::uint64_t seed = 1;
  int trials = 100;  ///< haar-scan only
  Objective objective;
  OptimizerSpec optimizer;
  std::vector<double> tradeoff_thresholds;  ///< non-empty selects trade-off mode

  /// Strict parse: unknown keys and wrong types raise ConfigError. Relative
  /// file paths resolve against `base_dir`.
  static ScenarioConfig from_json(const json& j, const std::filesystem::path& base_dir = {});
  /// Effective configuration, with every default written out.
  json to_json() const;

  Scenario scenario() const;
  int physical_modes() const;
  CMatrix build_unitary() const;
};

/// Configuration of the theorem sweep behind `verify`.
struct VerifyConfig {
  std::vector<int> d{3};
  std::vector<int> ancillae{0};
  int trials = 100;
  std::uint64_t seed = 1;
  int vacuum_pads = 0;
  SweepInputs inputs = SweepInputs::GraphState;

  static VerifyConfig from_json(const json& j);
  json to_json() const;
};

enum class EntropyUnits { Nats, Dits };

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string str() const;
};

/// Everything one subcommand produces. `report` is the RunReport JSON
/// {tool, version, command, seed, config, outcomes, summary, ...}.
struct RunResult {
  json report;
  std::map<std::string, CsvTable> tables;        ///< file name -> CSV
  std::map<std::string, std::string> text_files;  ///< file name -> contents
  int exit_code = kExitOk;
  std::string message;  ///< one-line human summary
};

struct RunOptions {
  EntropyUnits entropy_units = EntropyUnits::Nats;
  std::string inject_fault;  ///< test hook: "rho" corrupts sweep densities
};

RunResult cmd_fuse(const ScenarioConfig& config, const RunOptions& options = {});
RunResult cmd_verify(const VerifyConfig& config, const RunOptions& options = {});
RunResult cmd_optimize(const ScenarioConfig& config, const RunOptions& options = {});
RunResult cmd_haar_scan(const ScenarioConfig& config, const RunOptions& options = {});

/// Reads a config file. A RunReport is accepted too, in which case its
/// embedded "config" is used (and its command must match when given).
json load_config_document(const std::filesystem::path& path, const std::string& command);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

std::string version();

}  // namespace quditfuse::cli
