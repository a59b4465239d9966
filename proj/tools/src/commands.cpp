#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "quditfuse/parallel.hpp"
#include "quditfuse/unitary_io.hpp"
#include "quditfuse_cli/cli.hpp"

#ifndef QUDITFUSE_VERSION
#define QUDITFUSE_VERSION "0.0.0"
#endif

namespace quditfuse::cli {

std::string version() { return QUDITFUSE_VERSION; }

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

namespace {

std::string num(double v) { return format_double(v); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

json header(const std::string& command, std::uint64_t seed, json config) {
  return {{"tool", "quditfuse"}, {"version", version()}, {"command", command}, {"seed", seed}, {"config", std::move(config)}};
}

double display_entropy(double nats, int d, EntropyUnits units) {
  return units == EntropyUnits::Dits ? nats / std::log(static_cast<double>(d)) : nats;
}

const char* entropy_column(EntropyUnits units) { return units == EntropyUnits::Dits ? "entropy_dits" : "entropy_nats"; }

// Outcome table shared by fuse and optimize.
void emit_outcomes(const ScenarioEvaluation& ev, int d, const RunOptions& opt, json& report, CsvTable& table) {
  table.header = {"pattern", "probability", "relevant", "heralded", "rank", entropy_column(opt.entropy_units),
                  "residual", "meets_objective"};
  json outs = json::array();
  int max_rank = 0;
  double max_entropy = 0.0;
  double total = 0.0;
  for (const auto& o : ev.outcomes) {
    outs.push_back({{"pattern", o.pattern.to_string()},
                    {"probability", o.probability},
                    {"relevant", o.relevant},
                    {"heralded", o.heralded},
                    {"rank", o.rank},
                    {"entropy", o.entropy},
                    {"residual", o.residual},
                    {"meets_objective", o.meets_objective}});
    table.rows.push_back({o.pattern.to_string(), num(o.probability), flag(o.relevant), flag(o.heralded),
                          std::to_string(o.rank), num(display_entropy(o.entropy, d, opt.entropy_units)),
                          num(o.residual), flag(o.meets_objective)});
    max_rank = std::max(max_rank, o.rank);
    max_entropy = std::max(max_entropy, o.entropy);
    total += o.probability;
  }
  report["outcomes"] = std::move(outs);
  report["summary"] = {{"total_probability", total},
                       {"relevant_probability", ev.relevant_probability},
                       {"success_probability", ev.success_probability},
                       {"objective_value", ev.value},
                       {"max_rank", max_rank},
                       {"max_entropy", max_entropy}};
}

}  // namespace

RunResult cmd_fuse(const ScenarioConfig& config, const RunOptions& options) {
  RunResult res;
  const Scenario scenario = config.scenario();
  const CMatrix u = config.build_unitary();
  const ScenarioEvaluation ev = evaluate(Interferometer(u), scenario, config.objective);
  res.report = header("fuse", config.seed, config.to_json());
  res.report["unitary"] = matrix_json(u);
  emit_outcomes(ev, config.d, options, res.report, res.tables["fuse_outcomes.csv"]);
  res.report["summary"]["photons"] = scenario.photons();
  res.report["summary"]["modes"] = scenario.physical_modes();
  std::ostringstream msg;
  msg << "fuse: " << ev.outcomes.size() << " outcomes, relevant probability " << num(ev.relevant_probability)
      << ", success probability " << num(ev.success_probability);
  res.message = msg.str();
  return res;
}

RunResult cmd_verify(const VerifyConfig& config, const RunOptions& options) {
  RunResult res;
  res.report = header("verify", config.seed, config.to_json());
  CsvTable& table = res.tables["verify_outcomes.csv"];
  table.header = {"d", "ancillae", "trial", "trial_seed", "pattern", "probability", "relevant", "rank",
                  entropy_column(options.entropy_units), "residual", "residual_other", "kernel_residual"};
  json runs = json::array();
  json violations = json::array();
  for (int d : config.d) {
    for (int a : config.ancillae) {
      SweepConfig sc;
      sc.d = d;
      sc.ancillae = a;
      sc.trials = config.trials;
      sc.seed = config.seed;
      sc.vacuum_pads = config.vacuum_pads;
      sc.inputs = config.inputs;
      if (options.inject_fault == "rho") {
        sc.rho_hook = [](CMatrix& rho) { rho = CMatrix::Identity(rho.rows(), rho.cols()) / static_cast<double>(rho.rows()); };
      }
      const SweepReport r = theorem_sweep(sc);
      for (const auto& row : r.rows) {
        table.rows.push_back({std::to_string(d), std::to_string(a), std::to_string(row.trial),
                              std::to_string(row.trial_seed), row.pattern.to_string(), num(row.probability),
                              flag(row.relevant), std::to_string(row.rank),
                              num(display_entropy(row.entropy, d, options.entropy_units)), num(row.residual),
                              num(row.residual_other), num(row.kernel_residual)});
      }
      for (const auto& v : r.violations) {
        violations.push_back({{"d", d},
                              {"ancillae", a},
                              {"check", v.check},
                              {"trial", v.trial},
                              {"trial_seed", v.trial_seed},
                              {"pattern", v.pattern},
                              {"detail", v.detail}});
      }
      runs.push_back({{"d", d},
                      {"ancillae", a},
                      {"photons", r.photons},
                      {"modes", r.modes},
                      {"trials", config.trials},
                      {"outcomes", r.rows.size()},
                      {"max_rank", r.max_rank},
                      {"max_entropy", r.max_entropy},
                      {"min_residual", std::isfinite(r.min_residual) ? json(r.min_residual) : json(nullptr)},
                      {"min_product_probability", r.min_product_probability},
                      {"max_probability_defect", r.max_probability_defect},
                      {"certificates_checked", r.certificates_checked},
                      {"violations", r.violations.size()}});
    }
  }
  res.report["outcomes"] = std::move(runs);
  res.report["summary"] = {{"violations", violations.size()}, {"passed", violations.empty()}};
  res.report["violations"] = violations;
  res.exit_code = violations.empty() ? kExitOk : kExitViolation;
  std::ostringstream msg;
  if (violations.empty()) {
    msg << "verify: all checks hold (" << table.rows.size() << " outcomes)";
  } else {
    const json& v = violations.front();
    msg << "verify: " << violations.size() << " violation(s); first: check " << v["check"].get<std::string>()
        << " at d=" << v["d"] << " ancillae=" << v["ancillae"] << " seed=" << v["trial_seed"]
        << " trial=" << v["trial"] << " pattern=" << v["pattern"].get<std::string>();
  }
  res.message = msg.str();
  return res;
}

RunResult cmd_optimize(const ScenarioConfig& config, const RunOptions& options) {
  RunResult res;
  const Scenario scenario = config.scenario();
  OptimizerConfig oc;
  oc.budget = config.optimizer.budget;
  oc.restarts = config.optimizer.restarts;
  oc.seed = config.seed;
  oc.initial_step = config.optimizer.initial_step;
  oc.min_step = config.optimizer.min_step;
  oc.search_ancilla_states = config.optimizer.search_ancilla_states;
  if (config.optimizer.start_from_unitary) oc.start_unitary = config.build_unitary();
  res.report = header("optimize", config.seed, config.to_json());

  if (!config.tradeoff_thresholds.empty()) {
    const TradeoffCurve curve = tradeoff_curve(scenario, config.tradeoff_thresholds, oc);
    CsvTable& t = res.tables["tradeoff.csv"];
    t.header = {"threshold", "best_value"};
    json rows = json::array();
    for (const auto& r : curve.rows) {
      t.rows.push_back({num(r.threshold), num(r.best_value)});
      rows.push_back({{"threshold", r.threshold}, {"best_value", r.best_value}});
    }
    res.report["outcomes"] = rows;
    res.report["summary"] = {{"mode", "tradeoff"}, {"rows", curve.rows.size()}, {"monotone", curve.monotone}};
    res.message = "optimize: trade-off curve with " + std::to_string(curve.rows.size()) + " thresholds" +
                  (curve.monotone ? "" : " (not monotone)");
    return res;
  }

  const OptimizeResult r = optimize(scenario, config.objective, oc);
  Scenario best = scenario;
  std::size_t slot = 0;
  for (auto& in : best.inputs) {
    if (std::holds_alternative<AncillaInput>(in)) in = AncillaInput(r.best_ancilla_states.at(slot++));
  }
  const ScenarioEvaluation ev = evaluate(Interferometer(r.best_unitary), best, config.objective);
  emit_outcomes(ev, config.d, options, res.report, res.tables["optimize_outcomes.csv"]);

  json ancillas = json::array();
  for (const auto& a : r.best_ancilla_states) {
    json v = json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i) v.push_back({a(i).real(), a(i).imag()});
    ancillas.push_back(std::move(v));
  }
  res.report["result"] = {{"best_value", r.best_value},
                          {"best_success_probability", r.best_success_probability},
                          {"best_restart", r.best_restart},
                          {"evaluations", r.evaluations},
                          {"restart_values", r.restart_values},
                          {"best_unitary", matrix_json(r.best_unitary)},
                          {"best_ancilla_states", ancillas}};
  res.report["summary"]["best_value"] = r.best_value;
  CsvTable& trace = res.tables["optimize_trace.csv"];
  trace.header = {"evaluation", "value"};
  trace.rows.reserve(r.trace.size());
  for (const auto& p : r.trace) trace.rows.push_back({num(p.evaluation), num(p.value)});
  res.text_files["best_unitary.txt"] = format_unitary(r.best_unitary);
  res.message = "optimize: best value " + num(r.best_value) + " after " + std::to_string(r.evaluations) +
                " evaluations (restart " + std::to_string(r.best_restart) + ")";
  return res;
}

RunResult cmd_haar_scan(const ScenarioConfig& config, const RunOptions& options) {
  RunResult res;
  const Scenario scenario = config.scenario();
  const int k = scenario.physical_modes();
  HaarSampler sampler(config.seed);
  std::vector<CMatrix> us;
  for (int t = 0; t < config.trials; ++t) us.push_back(sampler.next_matrix(k));
  std::vector<ScenarioEvaluation> evs(us.size());
  parallel_for(us.size(), 0, [&](std::size_t t) { evs[t] = evaluate(Interferometer(us[t]), scenario, config.objective); });

  res.report = header("haar-scan", config.seed, config.to_json());
  CsvTable& table = res.tables["haar_scan_outcomes.csv"];
  table.header = {"trial", "objective_value", "success_probability", "relevant_probability", "max_rank",
                  std::string("max_") + entropy_column(options.entropy_units)};
  json rows = json::array();
  double best = -std::numeric_limits<double>::infinity();
  double mean = 0.0;
  int best_trial = 0;
  for (std::size_t t = 0; t < evs.size(); ++t) {
    int rank = 0;
    double s = 0.0;
    for (const auto& o : evs[t].outcomes) {
      rank = std::max(rank, o.rank);
      s = std::max(s, o.entropy);
    }
    table.rows.push_back({std::to_string(t), num(evs[t].value), num(evs[t].success_probability),
                          num(evs[t].relevant_probability), std::to_string(rank),
                          num(display_entropy(s, config.d, options.entropy_units))});
    rows.push_back({{"trial", t},
                    {"objective_value", evs[t].value},
                    {"success_probability", evs[t].success_probability},
                    {"relevant_probability", evs[t].relevant_probability},
                    {"max_rank", rank},
                    {"max_entropy", s}});
    if (evs[t].value > best) {
      best = evs[t].value;
      best_trial = static_cast<int>(t);
    }
    mean += evs[t].value / static_cast<double>(evs.size());
  }
  res.report["outcomes"] = std::move(rows);
  res.report["summary"] = {{"trials", config.trials}, {"best_value", best}, {"best_trial", best_trial}, {"mean_value", mean}};
  res.message = "haar-scan: best objective " + num(best) + " over " + std::to_string(config.trials) + " Haar unitaries";
  return res;
}

}  // namespace quditfuse::cli
