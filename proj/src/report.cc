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

#include "fedsim/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fedsim/errors.hpp"
#include "json.hpp"

namespace fedsim {
namespace {

using nlohmann::json;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

std::string opt_number(const std::optional<double>& v) {
  return v ? csv_number(*v) : std::string();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json schedule_json(const LrSchedule& s) {
  return {{"kind", s.kind == ScheduleKind::kTheoretical ? "theoretical" : "exponential"},
          {"mu", s.mu},
          {"gamma", s.gamma},
          {"eta0", s.eta0},
          {"decay", s.decay}};
}

LrSchedule schedule_from(const json& j) {
  LrSchedule s;
  s.kind = j.at("kind") == "theoretical" ? ScheduleKind::kTheoretical : ScheduleKind::kExponential;
  s.mu = j.at("mu");
  s.gamma = j.at("gamma");
  s.eta0 = j.at("eta0");
  s.decay = j.at("decay");
  return s;
}

Provenance provenance_from(const std::string& s) {
  if (s == "analytic") return Provenance::kAnalytic;
  if (s == "estimated") return Provenance::kEstimated;
  return Provenance::kUnavailable;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const fs::path& path) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw IngestionError(path.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  }
};

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IngestionError(path.string() + ": empty file");
  t.header = split_csv(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != t.header.size()) {
      throw IngestionError(path.string() + ": line " + std::to_string(line_no) + " has " +
                           std::to_string(cells.size()) + " fields, header has " +
                           std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::optional<double> parse_cell(const std::string& cell, const fs::path& path) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) {
    throw IngestionError(path.string() + ": cannot read '" + cell + "' as a number");
  }
  return v;
}

bool close_enough(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

}  // namespace

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_round_log(const RunResult& run, const fs::path& path) {
  auto out = open_out(path);
  const std::size_t n = run.rounds.empty() ? 0 : run.rounds.front().alphas.size();
  out << "round,global_loss,accuracy,dist2_to_opt,rho,thm1_rhs,lemma2_lhs,lemma2_rhs";
  for (std::size_t i = 0; i < n; ++i) out << ",alpha_" << i;
  out << "\n";
  for (const auto& r : run.rounds) {
    out << r.round << ',' << csv_number(r.global_loss) << ',' << opt_number(r.accuracy) << ','
        << opt_number(r.dist2_to_opt) << ',' << opt_number(r.rho) << ','
        << opt_number(r.thm1_rhs) << ',' << opt_number(r.lemma2_lhs) << ','
        << opt_number(r.lemma2_rhs);
    for (double a : r.alphas.values) out << ',' << csv_number(a);
    out << "\n";
  }
  close_out(out, path);
}

void write_participation(const RunResult& run, std::size_t top, const fs::path& path) {
  auto out = open_out(path);
  const std::size_t n = run.rounds.empty() ? 0 : run.rounds.front().alphas.size();
  out << "round";
  for (std::size_t i = 0; i < n; ++i) out << ",client_" << i;
  out << "\n";
  std::vector<std::size_t> order(n);
  for (const auto& r : run.rounds) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r.alphas[a] > r.alphas[b]; });
    std::vector<int> mark(n, 0);
    for (std::size_t k = 0; k < std::min(top, n); ++k) mark[order[k]] = 1;
    out << r.round;
    for (int m : mark) out << ',' << m;
    out << "\n";
  }
  close_out(out, path);
}

void write_client_log(const RunResult& run, const fs::path& path) {
  auto out = open_out(path);
  out << "round,client,loss_reported,loss_at_start\n";
  for (const auto& r : run.rounds) {
    for (std::size_t i = 0; i < r.client_loss.size(); ++i) {
      out << r.round << ',' << i << ',' << csv_number(r.client_loss[i]) << ','
          << csv_number(r.client_at_start[i]) << "\n";
    }
  }
  close_out(out, path);
}

void write_step_log(const RunResult& run, const fs::path& path) {
  auto out = open_out(path);
  out << "t,sync,eta,delta,thm1_next,thm1_ok,lemma2_lhs\n";
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const auto& s = run.steps[k];
    const bool last = k + 1 == run.steps.size();
    out << s.t << ',' << (s.sync ? 1 : 0) << ',' << csv_number(s.eta) << ','
        << csv_number(s.delta) << ',' << (last ? std::string() : csv_number(s.thm1_next)) << ','
        << (last ? std::string() : std::string(s.thm1_ok ? "1" : "0")) << ','
        << csv_number(s.lemma2_lhs) << "\n";
  }
  close_out(out, path);
}

void write_model(const ParamVector& w, const fs::path& path) {
  auto out = open_out(path);
  out << "index,value\n";
  for (std::size_t i = 0; i < w.size(); ++i) out << i << ',' << csv_number(w[i]) << "\n";
  close_out(out, path);
}

void write_manifest(const ExperimentConfig& cfg, std::uint64_t run_seed,
                    const std::vector<fs::path>& outputs, const fs::path& path) {
  json j;
  j["version"] = FEDSIM_VERSION;
  j["run_seed"] = run_seed;
  j["started_utc"] = utc_now();
  j["config"] = serialize_config(cfg);
  j["outputs"] = json::array();
  for (const auto& p : outputs) j["outputs"].push_back(p.filename().string());
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  close_out(out, path);
}

void write_theory(const ExperimentConfig& cfg, const Problem& problem, const RunResult& run,
                  const fs::path& path) {
  json j;
  j["run_seed"] = run.run_seed;
  j["n_clients"] = problem.client_count();
  j["rounds"] = run.rounds.size();
  j["local_steps"] = run.local_steps;
  j["uniform_steps"] = run.uniform_steps;
  j["accuracy_threshold"] = cfg.evaluation.accuracy_threshold;
  j["p"] = problem.p;
  j["f_star_known"] = problem.f_star_known;
  if (problem.f_star_known) j["f_star"] = problem.f_star;
  if (problem.global) {
    j["F_star"] = problem.global->value;
    j["f_at_opt"] = problem.f_at_opt;
  }
  if (problem.Gamma) j["Gamma"] = *problem.Gamma;
  if (run.delta0) j["delta0"] = *run.delta0;
  j["max_grad_sq"] = run.max_grad_sq;
  j["schedule"] = schedule_json(run.schedule);
  if (run.constants) {
    const auto& c = *run.constants;
    j["constants"] = {{"mu", number_or_null(c.mu)},
                      {"L", number_or_null(c.L)},
                      {"G2", c.G2},
                      {"sigma2", c.sigma2},
                      {"gamma", number_or_null(c.gamma)},
                      {"mu_source", to_string(c.mu_source)},
                      {"L_source", to_string(c.L_source)},
                      {"G2_source", to_string(c.G2_source)},
                      {"sigma2_source", to_string(c.sigma2_source)}};
  }
  if (run.rho_bar) j["rho_bar"] = *run.rho_bar;
  if (run.rho_tilde) j["rho_tilde"] = *run.rho_tilde;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  close_out(out, path);
}

std::vector<fs::path> write_run(const ExperimentConfig& cfg, const Problem& problem,
                                const RunResult& run, const fs::path& dir) {
  std::vector<fs::path> files{dir / "rounds.csv", dir / "participation.csv",
                              dir / "clients.csv", dir / "final_model.csv",
                              dir / "theory.json"};
  if (!run.steps.empty()) files.push_back(dir / "steps.csv");
  write_round_log(run, files[0]);
  write_participation(run, cfg.evaluation.participation_top, files[1]);
  write_client_log(run, files[2]);
  write_model(run.w_final, files[3]);
  write_theory(cfg, problem, run, files[4]);
  if (!run.steps.empty()) write_step_log(run, files[5]);
  return files;
}

SummaryRow summarize(const std::string& framework, const std::string& strategy,
                     const std::vector<RunResult>& runs, const Problem& problem,
                     double threshold) {
  if (runs.empty()) throw UsageError("summarize: no runs");
  SummaryRow row;
  row.framework = framework;
  row.strategy = strategy;
  row.seeds = runs.size();
  row.Gamma = problem.Gamma;

  std::vector<std::vector<double>> curves;
  std::vector<double> finals, stabilities;
  std::vector<AlphaVector> alphas;
  for (const auto& run : runs) {
    curves.push_back(run.accuracy_curve());
    if (!run.rounds.empty()) finals.push_back(curves.back().back());
    if (curves.back().size() >= 3) stabilities.push_back(stability_index(curves.back()));
    for (const auto& r : run.rounds) alphas.push_back(r.alphas);
  }
  row.r90 = r90_ci(curves, threshold);
  row.final_accuracy = mean_of(finals);
  row.stability = stabilities.empty() ? 0.0 : mean_of(stabilities);
  if (!alphas.empty()) row.kappa = kappa_stats(alphas, problem.p);
  return row;
}

void write_summary(const std::vector<SummaryRow>& rows, const fs::path& csv_path,
                   const fs::path& text_path) {
  auto csv = open_out(csv_path);
  csv << "framework,strategy,seeds,r90_mean,r90_lo,r90_hi,r90_crossed,r90_missing,"
         "final_accuracy,stability,pi,Pi,error_bound,Gamma\n";
  for (const auto& r : rows) {
    csv << r.framework << ',' << r.strategy << ',' << r.seeds << ',' << csv_number(r.r90.mean)
        << ',' << csv_number(r.r90.lo) << ',' << csv_number(r.r90.hi) << ',' << r.r90.finite
        << ',' << r.r90.missing << ',' << csv_number(r.final_accuracy) << ','
        << csv_number(r.stability) << ',' << csv_number(r.kappa.pi) << ','
        << csv_number(r.kappa.Pi) << ',' << csv_number(r.kappa.error_bound) << ','
        << opt_number(r.Gamma) << "\n";
  }
  close_out(csv, csv_path);

  auto txt = open_out(text_path);
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %-11s %5s %22s %9s %10s %8s %8s %11s %10s\n",
                "framework", "strategy", "seeds", "R (mean [95% CI])", "final acc", "stability",
                "pi", "Pi", "error bound", "Gamma");
  txt << line;
  for (const auto& r : rows) {
    char r90[64];
    if (r.r90.crossed) {
      std::snprintf(r90, sizeof(r90), "%.2f [%.2f, %.2f]", r.r90.mean, r.r90.lo, r.r90.hi);
    } else {
      std::snprintf(r90, sizeof(r90), "not reached");
    }
    char gamma[32] = "-";
    if (r.Gamma) std::snprintf(gamma, sizeof(gamma), "%.4g", *r.Gamma);
    char bound[32];
    if (r.kappa.bounded()) {
      std::snprintf(bound, sizeof(bound), "%.4g", r.kappa.error_bound);
    } else {
      std::snprintf(bound, sizeof(bound), "unbounded");
    }
    std::snprintf(line, sizeof(line), "%-10s %-11s %5zu %22s %9.4f %10.4g %8.4g %8.4g %11s %10s\n",
                  r.framework.c_str(), r.strategy.c_str(), r.seeds, r90, r.final_accuracy,
                  r.stability, r.kappa.pi, r.kappa.Pi, bound, gamma);
    txt << line;
  }
  close_out(txt, text_path);
}

InspectReport inspect_log(const fs::path& target) {
  const fs::path dir = fs::is_directory(target) ? target : target.parent_path();
  const fs::path rounds_path = fs::is_directory(target) ? dir / "rounds.csv" : target;
  const fs::path clients_path = dir / "clients.csv";
  const fs::path theory_path = dir / "theory.json";

  const Table rounds = read_csv(rounds_path);
  json theory;
  {
    std::ifstream in(theory_path);
    if (!in) throw IngestionError("cannot open " + theory_path.string());
    try {
      in >> theory;
    } catch (const json::exception& e) {
      throw IngestionError(theory_path.string() + ": " + e.what());
    }
  }

  InspectReport rep;
  const std::vector<double> p = theory.at("p").get<std::vector<double>>();
  const std::size_t n = p.size();
  rep.rounds = rounds.rows.size();
  rep.clients = n;
  rep.threshold = theory.value("accuracy_threshold", 0.9);

  std::vector<std::size_t> alpha_cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    alpha_cols[i] = rounds.column("alpha_" + std::to_string(i), rounds_path);
  }
  const std::size_t c_acc = rounds.column("accuracy", rounds_path);
  const std::size_t c_dist = rounds.column("dist2_to_opt", rounds_path);
  const std::size_t c_rho = rounds.column("rho", rounds_path);
  const std::size_t c_thm = rounds.column("thm1_rhs", rounds_path);
  const std::size_t c_l2 = rounds.column("lemma2_rhs", rounds_path);

  std::vector<AlphaVector> alphas(rep.rounds);
  std::vector<double> accuracy;
  for (std::size_t r = 0; r < rep.rounds; ++r) {
    alphas[r].values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      alphas[r].values[i] = parse_cell(rounds.rows[r][alpha_cols[i]], rounds_path).value_or(0.0);
    }
    if (auto a = parse_cell(rounds.rows[r][c_acc], rounds_path)) accuracy.push_back(*a);
  }
  if (rep.rounds > 0) rep.kappa = kappa_stats(alphas, p);
  if (!accuracy.empty()) {
    rep.final_accuracy = accuracy.back();
    rep.r_threshold = rounds_to_threshold(accuracy, rep.threshold);
    if (accuracy.size() >= 3) rep.stability = stability_index(accuracy);
  }

  // rho from the per-client losses at the broadcast model
  if (theory.value("f_star_known", false) && fs::exists(clients_path)) {
    const Table clients = read_csv(clients_path);
    const std::size_t c_round = clients.column("round", clients_path);
    const std::size_t c_client = clients.column("client", clients_path);
    const std::size_t c_start = clients.column("loss_at_start", clients_path);
    std::vector<std::vector<double>> at_start(rep.rounds, std::vector<double>(n, 0.0));
    for (const auto& row : clients.rows) {
      const auto r = static_cast<std::size_t>(*parse_cell(row[c_round], clients_path));
      const auto i = static_cast<std::size_t>(*parse_cell(row[c_client], clients_path));
      if (r >= rep.rounds || i >= n) {
        throw IngestionError(clients_path.string() + ": round/client out of range");
      }
      at_start[r][i] = *parse_cell(row[c_start], clients_path);
    }
    const std::vector<double> f_star = theory.at("f_star").get<std::vector<double>>();
    for (std::size_t r = 0; r < rep.rounds; ++r) {
      const auto logged = parse_cell(rounds.rows[r][c_rho], rounds_path);
      const auto again = weighting_skew(at_start[r], f_star, alphas[r].values, p);
      if (logged.has_value() != again.has_value()) {
        rep.consistent = false;
        continue;
      }
      if (!logged) continue;
      ++rep.rho_checked;
      rep.max_rho_diff = std::max(rep.max_rho_diff, std::abs(*logged - *again));
      if (!close_enough(*logged, *again)) rep.consistent = false;
    }
  }

  // bound columns from the recorded constants
  const bool bounds = theory.contains("constants") && theory.contains("delta0") &&
                      theory.value("uniform_steps", false) &&
                      !theory["constants"]["mu"].is_null() &&
                      theory["constants"]["mu_source"] != "unavailable";
  if (bounds) {
    const json& c = theory["constants"];
    TheoryContext ctx;
    ctx.constants.mu = c.at("mu");
    ctx.constants.L = c.at("L");
    ctx.constants.G2 = c.at("G2");
    ctx.constants.sigma2 = c.at("sigma2");
    ctx.constants.gamma = c.at("gamma");
    ctx.constants.mu_source = provenance_from(c.at("mu_source"));
    ctx.schedule = schedule_from(theory.at("schedule"));
    ctx.local_steps = theory.at("local_steps");
    ctx.rho_bar = theory.at("rho_bar");
    ctx.rho_tilde = theory.at("rho_tilde");
    ctx.Gamma = std::max(0.0, theory.value("Gamma", 0.0));
    double delta = theory.at("delta0");
    for (std::size_t r = 0; r < rep.rounds; ++r) {
      const auto logged = parse_cell(rounds.rows[r][c_thm], rounds_path);
      const auto logged_l2 = parse_cell(rounds.rows[r][c_l2], rounds_path);
      const auto dist = parse_cell(rounds.rows[r][c_dist], rounds_path);
      if (!logged || !logged_l2 || !dist) {
        rep.consistent = false;
        break;
      }
      const double again = round_envelope(ctx, r, delta).value;
      const double again_l2 = round_lemma2_rhs(ctx, r);
      ++rep.bounds_checked;
      rep.max_thm1_diff = std::max(rep.max_thm1_diff, std::abs(*logged - again));
      rep.max_lemma2_diff = std::max(rep.max_lemma2_diff, std::abs(*logged_l2 - again_l2));
      if (!close_enough(*logged, again) || !close_enough(*logged_l2, again_l2)) {
        rep.consistent = false;
      }
      delta = *dist;
    }
  }
  return rep;
}

}  // namespace fedsim
