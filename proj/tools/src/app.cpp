#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "quditfuse_cli/cli.hpp"

namespace quditfuse::cli {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out = ".";
  std::string format = "both";
  std::string units = "nats";
  std::string fault;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
  if (!f) throw ConfigError("failed while writing " + path.string());
}

void write_outputs(const RunResult& r, const std::string& command, const Flags& flags) {
  const std::filesystem::path dir(flags.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::string stem = command;
  std::replace(stem.begin(), stem.end(), '-', '_');
  if (flags.format != "csv") write_file(dir / (stem + "_report.json"), r.report.dump(2) + "\n");
  if (flags.format != "json") {
    for (const auto& [name, table] : r.tables) write_file(dir / name, table.str());
  }
  for (const auto& [name, text] : r.text_files) write_file(dir / name, text);
}

RunResult dispatch(const std::string& command, const Flags& flags) {
  RunOptions opt;
  opt.entropy_units = flags.units == "dits" ? EntropyUnits::Dits : EntropyUnits::Nats;
  opt.inject_fault = flags.fault;

  if (command == "verify") {
    VerifyConfig vc = flags.config.empty() ? VerifyConfig{} : VerifyConfig::from_json(load_config_document(flags.config, command));
    if (flags.seed) vc.seed = *flags.seed;
    if (flags.trials) vc.trials = *flags.trials;
    if (vc.trials < 1) throw ConfigError("--trials must be positive");
    return cmd_verify(vc, opt);
  }

  if (flags.config.empty()) throw ConfigError(command + " needs --config");
  const std::filesystem::path path(flags.config);
  ScenarioConfig sc = ScenarioConfig::from_json(load_config_document(path, command), path.parent_path());
  if (flags.seed) sc.seed = *flags.seed;
  if (flags.trials) sc.trials = *flags.trials;
  if (sc.trials < 1) throw ConfigError("--trials must be positive");
  if (command == "fuse") return cmd_fuse(sc, opt);
  if (command == "optimize") return cmd_optimize(sc, opt);
  return cmd_haar_scan(sc, opt);
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Simulate and optimize linear-optical fusion of qudit cluster states.", "quditfuse"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "Scenario or verify config (JSON); a RunReport is accepted too");
  app.add_option("--seed", flags.seed, "Override the config seed");
  app.add_option("--trials", flags.trials, "Override the trial count (verify, haar-scan)");
  app.add_option("--out", flags.out, "Output directory")->capture_default_str();
  app.add_option("--format", flags.format, "Files to write")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();
  app.add_option("--entropy-units", flags.units, "Entropy units for CSV and console output (JSON stays in nats)")
      ->check(CLI::IsMember({"nats", "dits"}))
      ->capture_default_str();
  app.add_option("--inject-fault", flags.fault, "")->group("")->check(CLI::IsMember({"rho"}));

  app.add_subcommand("fuse", "Fuse the configured inputs through one interferometer");
  app.add_subcommand("verify", "Randomized check of the rank bounds over Haar interferometers");
  app.add_subcommand("optimize", "Search interferometers for maximal heralded success");
  app.add_subcommand("haar-scan", "Evaluate the objective on Haar-random interferometers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const RunResult r = dispatch(command, flags);
    write_outputs(r, command, flags);
    (r.exit_code == kExitOk ? std::cout : std::cerr) << r.message << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TheoremViolation& e) {
    std::cerr << "rank bound violated at pattern " << e.pattern() << ": " << e.what() << '\n';
    return kExitViolation;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CapacityExceeded& e) {
    std::cerr << "too large: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace quditfuse::cli
