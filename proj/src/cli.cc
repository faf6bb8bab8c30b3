/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fedsim/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedsim/errors.hpp"
#include "fedsim/problem.hpp"
#include "fedsim/report.hpp"
#include "fedsim/simulation.hpp"
#include "fedsim/verify.hpp"

namespace fedsim {
namespace {

struct Flags {
  std::string out = "fedsim_out";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::size_t> seeds;
  bool quiet = false;
  std::string target;
};

fs::path output_dir(const Flags& f) {
  if (const char* env = std::getenv("FEDSIM_OUT"); env != nullptr && *env != '\0') return env;
  return f.out;
}

ExperimentConfig load(const Flags& f) {
  ExperimentConfig cfg = parse_config(f.target);
  if (f.seed) cfg.federation.run_seed = *f.seed;
  if (f.workers) {
    cfg.federation.workers = *f.workers;
    validate(cfg);
  }
  return cfg;
}

std::vector<Strategy> strategies_of(const ExperimentConfig& cfg) {
  if (cfg.sweep.strategies.empty()) return {cfg.strategy};
  std::vector<Strategy> out;
  for (auto kind : cfg.sweep.strategies) {
    Strategy s = cfg.strategy;
    s.kind = kind;
    out.push_back(s);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int cmd_run(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = load(f);
  const Problem problem = build_problem(cfg);
  const fs::path dir = output_dir(f);
  const std::vector<fs::path> files{dir / "rounds.csv", dir / "participation.csv",
                                    dir / "clients.csv", dir / "final_model.csv",
                                    dir / "theory.json"};
  write_manifest(cfg, cfg.federation.run_seed, files, dir / "manifest.json");
  const RunResult run = run_training(cfg, problem, cfg.federation.run_seed);
  write_run(cfg, problem, run, dir);
  if (!f.quiet) {
    out << "rounds: " << run.rounds.size() << "\n";
    if (!run.rounds.empty()) {
      const auto& last = run.rounds.back();
      out << "final global loss: " << fmt(last.global_loss) << "\n";
      if (last.accuracy) out << "final accuracy: " << fmt(*last.accuracy) << "\n";
      if (last.dist2_to_opt) out << "final ||w - w*||^2: " << fmt(*last.dist2_to_opt) << "\n";
    }
    out << "outputs: " << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
  ExperimentConfig cfg = load(f);
  if (f.seeds) cfg.sweep.seeds = *f.seeds;
  validate(cfg);
  const Problem problem = build_problem(cfg);
  const fs::path dir = output_dir(f);
  write_manifest(cfg, cfg.federation.run_seed, {dir / "summary.csv", dir / "summary.txt"},
                 dir / "manifest.json");

  std::vector<SummaryRow> rows;
  for (const Strategy& strategy : strategies_of(cfg)) {
    ExperimentConfig local = cfg;
    local.strategy = strategy;
    validate(local);
    const std::string name(to_string(strategy.kind));
    std::vector<RunResult> runs(cfg.sweep.seeds);
    parallel_for(runs.size(), cfg.federation.workers, [&](std::size_t k) {
      const std::uint64_t seed = cfg.federation.run_seed + k;
      const fs::path run_dir = dir / name / ("seed_" + std::to_string(seed));
      write_manifest(local, seed, {run_dir / "rounds.csv"}, run_dir / "manifest.json");
      runs[k] = run_training(local, problem, seed, RunOptions{1});
      write_run(local, problem, runs[k], run_dir);
    });
    rows.push_back(summarize(cfg.framework_label(), name, runs, problem,
                             cfg.evaluation.accuracy_threshold));
  }
  write_summary(rows, dir / "summary.csv", dir / "summary.txt");
  if (!f.quiet) {
    std::ifstream txt(dir / "summary.txt");
    out << txt.rdbuf();
  }
  return kExitOk;
}

int cmd_check(const Flags& f, std::ostream& out) {
  ExperimentConfig cfg = load(f);
  const std::size_t seeds = f.seeds.value_or(cfg.sweep.seeds);
  const Problem problem = build_problem(cfg);
  bool all = true;
  const fs::path dir = output_dir(f);
  std::ofstream csv;
  for (const Strategy& strategy : strategies_of(cfg)) {
    ExperimentConfig local = cfg;
    local.strategy = strategy;
    validate(local);
    const VerifyResult v = verify_theory(local, problem, seeds, cfg.federation.workers);
    all = all && v.passed();
    if (!csv.is_open()) {
      fs::create_directories(dir);
      csv.open(dir / "check.csv");
      csv << "strategy,seeds,check,checked,violations,worst_ratio,passed\n";
    }
    csv << v.strategy << ',' << v.seeds << ",theorem1," << v.theorem1.checked << ','
        << v.theorem1.violations << ',' << csv_number(v.theorem1.worst_ratio) << ','
        << v.theorem1.ok() << "\n";
    csv << v.strategy << ',' << v.seeds << ",lemma2," << v.lemma2.checked << ','
        << v.lemma2.violations << ',' << csv_number(v.lemma2.worst_ratio) << ','
        << (v.lemma2.checked == 0 || v.lemma2.ok()) << "\n";
    csv << v.strategy << ',' << v.seeds << ",gamma,1,0," << csv_number(v.Gamma) << ','
        << v.gamma_ok << "\n";
    csv << v.strategy << ',' << v.seeds << ",rho,1,0,," << v.rho_ok << "\n";
    if (!f.quiet) {
      auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
      out << "[" << v.strategy << ", " << v.seeds << " seed(s), H=" << v.local_steps
          << ", mu=" << fmt(v.constants.mu) << " (" << to_string(v.constants.mu_source)
          << "), L=" << fmt(v.constants.L) << " (" << to_string(v.constants.L_source)
          << "), G2=" << fmt(v.constants.G2) << ", sigma2=" << fmt(v.constants.sigma2)
          << " (" << to_string(v.constants.sigma2_source) << ")]\n";
      out << "  theorem 1: " << verdict(v.theorem1.ok()) << "  " << v.theorem1.checked
          << " steps, " << v.theorem1.violations << " violations, worst ratio "
          << fmt(v.theorem1.worst_ratio) << "\n";
      out << "  lemma 2:   " << verdict(v.lemma2.checked == 0 || v.lemma2.ok()) << "  "
          << v.lemma2.checked << " interior steps, " << v.lemma2.violations
          << " violations, worst ratio " << fmt(v.lemma2.worst_ratio) << "\n";
      out << "  Gamma:     " << verdict(v.gamma_ok) << "  " << fmt(v.Gamma) << "\n";
      out << "  rho:       " << verdict(v.rho_ok) << "  rho_bar " << fmt(v.rho_bar)
          << ", rho_tilde " << fmt(v.rho_tilde) << "\n";
    }
  }
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_inspect(const Flags& f, std::ostream& out) {
  const InspectReport rep = inspect_log(f.target);
  if (!f.quiet) {
    out << "rounds: " << rep.rounds << ", clients: " << rep.clients << "\n";
    if (rep.final_accuracy) out << "final accuracy: " << fmt(*rep.final_accuracy) << "\n";
    if (rep.final_accuracy) {
      out << "rounds to " << fmt(rep.threshold) << ": "
          << (rep.r_threshold ? std::to_string(*rep.r_threshold) : std::string("not reached"))
          << "\n";
    }
    if (rep.stability) out << "stability index: " << fmt(*rep.stability) << "\n";
    if (rep.kappa) {
      out << "pi: " << fmt(rep.kappa->pi) << ", Pi: " << fmt(rep.kappa->Pi)
          << ", error bound: "
          << (rep.kappa->bounded() ? fmt(rep.kappa->error_bound) : std::string("unbounded"))
          << "\n";
    }
    out << "rho recomputed on " << rep.rho_checked << " rounds, max diff "
        << fmt(rep.max_rho_diff) << "\n";
    out << "bounds recomputed on " << rep.bounds_checked << " rounds, max diff thm1 "
        << fmt(rep.max_thm1_diff) << ", lemma2 " << fmt(rep.max_lemma2_diff) << "\n";
    out << (rep.consistent ? "log consistent" : "log INCONSISTENT") << "\n";
  }
  return rep.consistent ? kExitOk : kExitCheckFailed;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fedsim: federated learning aggregation simulator", "fedsim"};
  app.set_version_flag("--version", FEDSIM_VERSION);
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "Output directory (FEDSIM_OUT overrides)");
    sub->add_option("--seed", f.seed, "Run seed override");
    sub->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", f.quiet, "No progress output");
  };
  auto* run = app.add_subcommand("run", "Single training run");
  run->add_option("config", f.target, "Config file")->required();
  common(run);
  auto* sweep = app.add_subcommand("sweep", "Multi-seed runs and summary");
  sweep->add_option("config", f.target, "Config file")->required();
  sweep->add_option("--seeds", f.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  common(sweep);
  auto* check = app.add_subcommand("check", "Theory verification on a testbed");
  check->add_option("config", f.target, "Config file")->required();
  check->add_option("--seeds", f.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  common(check);
  auto* inspect = app.add_subcommand("inspect", "Recompute metrics from a run log");
  inspect->add_option("log", f.target, "Run directory or rounds.csv")->required();
  common(inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(f, out);
    if (sweep->parsed()) return cmd_sweep(f, out);
    if (check->parsed()) return cmd_check(f, out);
    return cmd_inspect(f, out);
  } catch (const std::exception& e) {
    err << "fedsim: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace fedsim
