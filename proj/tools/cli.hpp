#pragma once

// The sepec command line. stdout carries machine-readable output only;
// diagnostics and progress go to stderr.
//
// Exit codes:
//   0  success
//   1  malformed or invalid input, usage errors
//   2  design problem is infeasible
//   3  solver budget exhausted (best iterate written with "partial": true)
//   4  a verification check failed
//   5  any other runtime error

#include <cstdlib>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sepec/sepec.hpp"

namespace sepec::cli {

enum Exit : int { kOk = 0, kInvalid = 1, kInfeasible = 2, kBudget = 3, kCheckFailed = 4, kRuntime = 5 };

struct Options {
  std::vector<std::string> inputs;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  bool plot = false;
  bool verbose = false;
};

inline std::size_t default_jobs() {
  if (const char* env = std::getenv("SEPEC_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 1;
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
  } else {
    io::write_file(path, text);
  }
}

inline void write_plots(const std::vector<sim::AggregateRow>& rows, const std::string& base, std::ostream& err,
                        bool verbose) {
  for (auto m : {io::Metric::Rmse, io::Metric::Power, io::Metric::SafetyLoss}) {
    std::string path = base;
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) path = path.substr(0, dot);
    path += "." + io::metric_name(m) + ".svg";
    io::write_file(path, io::line_chart_svg(rows, m));
    if (verbose) err << "wrote " << path << "\n";
  }
}

inline int cmd_design(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string& path = o.inputs.front();
  DesignProblem problem;
  try {
    problem = io::design_problem_from_json(io::parse_json(io::read_file(path), path));
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << path << ": " << e.what() << "\n";
    return kInvalid;
  }
  try {
    const DesignResult res = solve(problem);
    if (o.verbose)
      err << "objective " << res.objective << ", certificate " << res.certificate << ", cuts "
          << res.diagnostics.cuts << ", iterations " << res.diagnostics.iterations << "\n";
    emit(io::design_result_to_json(res).dump(2) + "\n", o.out, out);
    return kOk;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const BudgetExhausted& e) {
    err << "budget exhausted: " << e.what() << "\n";
    DesignResult partial;
    partial.policy = e.best();
    if (problem.setup == Setup::Cmab) partial.contexts = problem.pi0.size();
    partial.certificate = e.residual();
    partial.objective = std::numeric_limits<double>::quiet_NaN();
    partial.partial = true;
    partial.note = e.what();
    partial.diagnostics.cuts = e.cuts();
    partial.diagnostics.residual = e.residual();
    emit(io::design_result_to_json(partial).dump(2) + "\n", o.out, out);
    return kBudget;
  }
}

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string& path = o.inputs.front();
  sim::ExperimentConfig cfg;
  try {
    cfg = io::experiment_config_from_json(io::parse_json(io::read_file(path), path));
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << path << ": " << e.what() << "\n";
    return kInvalid;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output = o.out;
  const std::size_t jobs = o.jobs.value_or(default_jobs());
  std::function<void(std::size_t)> progress;
  if (o.verbose)
    progress = [&err, n = cfg.num_runs](std::size_t done) {
      if (done % 10 == 0 || done == n) err << "run " << done << "/" << n << "\n";
    };
  const auto result = sim::run_experiment(cfg, jobs, progress);
  // Aggregates come from the values as written, so `report` reproduces them.
  const auto records = io::rounded(result.records);
  const auto aggregates = sim::aggregate(records);
  const std::string agg_path = io::sibling_path(cfg.output, "aggregates");
  const std::string skip_path = io::sibling_path(cfg.output, "skipped");
  io::write_csv(records, cfg.output);
  io::write_file(agg_path, io::aggregates_to_csv(aggregates));
  io::write_file(skip_path, io::skips_to_csv(result.skipped));
  if (o.plot) write_plots(aggregates, cfg.output, err, o.verbose);
  if (!result.skipped.empty()) err << result.skipped.size() << " method runs skipped; see " << skip_path << "\n";
  nlohmann::json summary{{"records", cfg.output},
                         {"aggregates", agg_path},
                         {"skipped", skip_path},
                         {"n_records", records.size()},
                         {"n_skipped", result.skipped.size()},
                         {"seed", cfg.seed}};
  out << summary.dump() << "\n";
  return kOk;
}

inline int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<sim::RunRecord> records;
  for (const auto& p : o.inputs) {
    auto part = io::read_csv(p);
    records.insert(records.end(), part.begin(), part.end());
  }
  const auto aggregates = sim::aggregate(records);
  emit(io::aggregates_to_csv(aggregates), o.out, out);
  if (o.plot) write_plots(aggregates, o.out.empty() || o.out == "-" ? o.inputs.front() : o.out, err, o.verbose);
  return kOk;
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  bool ok = true;
  for (const auto& r : verify::run_all()) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << (o.verbose ? "  " + r.detail : std::string()) << "\n";
    ok = ok && r.pass;
  }
  if (!ok) err << "verification failed\n";
  return ok ? kOk : kCheckFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Safe exploration policy design for off-policy evaluation"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_flag("--verbose,-v", o.verbose, "Print diagnostics to stderr");
  };
  auto* design = app.add_subcommand("design", "Solve one design problem given as JSON");
  design->add_option("problem", o.inputs, "Design problem JSON")->required()->check(CLI::ExistingFile)->expected(1);
  design->add_option("--out,-o", o.out, "Write the result JSON here instead of stdout");
  common(design);

  auto* simulate = app.add_subcommand("simulate", "Run a simulation sweep from an experiment config");
  simulate->add_option("config", o.inputs, "Experiment config JSON")->required()->check(CLI::ExistingFile)->expected(1);
  simulate->add_option("--out,-o", o.out, "Record CSV path (sidecars are written next to it)");
  simulate->add_option("--seed", o.seed, "Override the config seed");
  simulate->add_option("--jobs,-j", o.jobs, "Worker threads (default: $SEPEC_JOBS or 1)")->check(CLI::PositiveNumber);
  simulate->add_flag("--plot", o.plot, "Also write one SVG chart per metric");
  common(simulate);

  auto* report = app.add_subcommand("report", "Recompute aggregates from record CSVs");
  report->add_option("records", o.inputs, "Record CSV files")->required()->check(CLI::ExistingFile);
  report->add_option("--out,-o", o.out, "Write the aggregate CSV here instead of stdout");
  report->add_flag("--plot", o.plot, "Also write one SVG chart per metric");
  common(report);

  auto* check = app.add_subcommand("verify", "Run the brute-force oracle suite");
  common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }
  try {
    if (*design) return cmd_design(o, out, err);
    if (*simulate) return cmd_simulate(o, out, err);
    if (*report) return cmd_report(o, out, err);
    return cmd_verify(o, out, err);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace sepec::cli
