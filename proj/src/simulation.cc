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

#include "fedsim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <thread>

#include "fedsim/errors.hpp"

namespace fedsim {

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t threads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> RunResult::accuracy_curve() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.accuracy.value_or(0.0));
  return out;
}

std::vector<AlphaVector> RunResult::alpha_series() const {
  std::vector<AlphaVector> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.alphas);
  return out;
}

LrSchedule resolve_schedule(const ExperimentConfig& cfg, const Problem& problem) {
  const auto& s = cfg.schedule;
  if (s.kind == ScheduleKind::kExponential) {
    return LrSchedule::exponential(s.eta0, s.decay, 1);
  }
  const GlobalObjective& obj = *problem.objective;
  double mu = std::numeric_limits<double>::infinity();
  double L = 0.0;
  bool known = true;
  for (std::size_t i = 0; i < obj.client_count(); ++i) {
    const auto m = obj.model(i).strong_convexity();
    const auto l = obj.model(i).smoothness();
    if (!m || !l) {
      known = false;
      break;
    }
    mu = std::min(mu, *m);
    L = std::max(L, *l);
  }
  LrSchedule out;
  out.kind = ScheduleKind::kTheoretical;
  if (s.mu) {
    out.mu = *s.mu;
  } else if (known && mu > 0.0) {
    out.mu = mu;
  } else {
    throw ConfigError("config key 'schedule.mu': no strong convexity known for this model");
  }
  if (s.gamma) {
    out.gamma = *s.gamma;
  } else if (known) {
    out.gamma = 4.0 * L / out.mu;
  } else {
    throw ConfigError("config key 'schedule.gamma': no smoothness known for this model");
  }
  return out;
}

Simulation::Simulation(const ExperimentConfig& cfg, const Problem& problem,
                       std::uint64_t run_seed, const RunOptions& options)
    : cfg_(cfg),
      problem_(problem),
      workers_(options.workers.value_or(cfg.federation.workers)),
      schedule_(resolve_schedule(cfg, problem)),
      strategy_(cfg.strategy) {
  training_.epochs = cfg.federation.local_epochs;
  training_.batch_size = cfg.federation.batch_size;
  training_.record_trajectory = cfg.federation.theory_checks;

  const std::size_t n = problem.client_count();
  clients_.resize(n);
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = clients_[i];
    c.id = static_cast<int>(i);
    c.model = problem.objective->model_ptr(i);
    c.p = problem.p[i];
    c.run_seed = run_seed;
    const std::size_t h = steps_per_round(c.model->sample_count(), training_);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  w_ = initial_point(problem, run_seed);
  result_.run_seed = run_seed;
  result_.w0 = w_;
  result_.local_steps = hi;
  result_.uniform_steps = lo == hi;
  result_.schedule = schedule_;
  if (problem.global) result_.delta0 = squared_distance(w_, problem.global->point);
  trace_steps_ = cfg.federation.theory_checks && result_.uniform_steps && problem.global;
}

RoundRecord Simulation::run_round() {
  if (round_ >= cfg_.federation.rounds) {
    throw UsageError("run_round: all " + std::to_string(cfg_.federation.rounds) +
                     " rounds already ran");
  }
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = clients_.size();
  const std::size_t r = round_;
  const GlobalObjective& obj = *problem_.objective;

  RoundRecord rec;
  rec.round = r;
  rec.client_at_start.resize(n);
  parallel_for(n, workers_, [&](std::size_t i) {
    rec.client_at_start[i] = obj.model(i).loss(w_);
    try {
      clients_[i] = client_update(clients_[i], w_, r, training_, schedule_);
    } catch (const ClientError&) {
      throw;
    } catch (const std::exception& e) {
      throw ClientError("client " + std::to_string(i) + ": " + e.what(), static_cast<int>(i));
    }
  });

  std::vector<ClientReport> reports(n);
  rec.client_loss.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = clients_[i];
    const double loss = cfg_.federation.loss_eval_point == EvalPoint::kLocal
                            ? c.last_report.loss_final
                            : rec.client_at_start[i];
    reports[i] = ClientReport{c.id, c.p, c.w, loss, problem_.f_star[i]};
    rec.client_loss[i] = loss;
    for (double g : c.last_report.grad_sq_norms) {
      result_.max_grad_sq = std::max(result_.max_grad_sq, g);
    }
  }
  rec.alphas = compute_alphas(strategy_, reports);

  if (trace_steps_) {
    const std::size_t H = result_.local_steps;
    const ParamVector& opt = problem_.global->point;
    std::vector<ParamVector> locals(n);
    for (std::size_t s = 0; s < H; ++s) {
      StepTrace st;
      st.t = r * H + s;
      st.eta = step_rate(schedule_, r, s, H);
      if (s == 0) {
        st.sync = true;
        st.delta = squared_distance(w_, opt);
      } else {
        for (std::size_t i = 0; i < n; ++i) locals[i] = clients_[i].trajectory[s - 1];
        const ParamVector avg = weighted_average(locals, problem_.p);
        st.delta = squared_distance(avg, opt);
        CompensatedSum lhs;
        for (std::size_t i = 0; i < n; ++i) {
          lhs.add(problem_.p[i] * squared_distance(avg, locals[i]));
        }
        st.lemma2_lhs = lhs.value();
      }
      result_.steps.push_back(st);
    }
    rec.lemma2_lhs = result_.steps.back().lemma2_lhs;
  }

  w_ = aggregate(reports, rec.alphas);
  rec.global_loss = obj.loss(w_);
  if (problem_.test) {
    const auto& clf = static_cast<const ClassifierModel&>(obj.model(0));
    rec.accuracy = clf.accuracy(w_, *problem_.test);
  }
  if (problem_.global) rec.dist2_to_opt = squared_distance(w_, problem_.global->point);
  if (problem_.f_star_known) {
    rec.rho = weighting_skew(rec.client_at_start, problem_.f_star, rec.alphas.values, problem_.p);
    if (!problem_.f_at_opt.empty()) {
      rec.rho_opt =
          weighting_skew(problem_.f_at_opt, problem_.f_star, rec.alphas.values, problem_.p);
    }
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  ++round_;
  result_.rounds.push_back(rec);
  return rec;
}

RunResult Simulation::finish() {
  if (trace_steps_) {
    StepTrace last;
    last.t = round_ * result_.local_steps;
    last.eta = step_rate(schedule_, round_, 0, result_.local_steps);
    last.sync = true;
    last.delta = squared_distance(w_, problem_.global->point);
    result_.steps.push_back(last);
  }
  result_.w_final = w_;
  return std::move(result_);
}

RunResult run_training(const ExperimentConfig& cfg, const Problem& problem,
                       std::uint64_t run_seed, const RunOptions& options) {
  Simulation sim(cfg, problem, run_seed, options);
  for (std::size_t r = 0; r < cfg.federation.rounds; ++r) sim.run_round();
  RunResult out = sim.finish();
  if (cfg.federation.theory_checks) {
    const TheoryConstants c = run_constants(cfg, problem, out.max_grad_sq, run_seed);
    annotate_theory(out, problem, c);
  }
  return out;
}

TheoryConstants run_constants(const ExperimentConfig& cfg, const Problem& problem,
                              double max_grad_sq, std::uint64_t probe_seed,
                              std::span<const ParamVector> probe_points) {
  ConstantsInput in;
  in.objective = problem.objective.get();
  in.max_grad_sq = max_grad_sq;
  in.g2_safety = cfg.evaluation.g2_safety;
  const std::size_t smallest =
      *std::min_element(problem.client_sizes.begin(), problem.client_sizes.end());
  in.batch_size = std::min(cfg.federation.batch_size, smallest);
  in.probe_seed = probe_seed;
  if (probe_points.empty()) {
    in.probe_points.push_back(ParamVector(problem.dim()));
    if (problem.global) in.probe_points.push_back(problem.global->point);
  } else {
    in.probe_points.assign(probe_points.begin(), probe_points.end());
  }
  return estimate_constants(in);
}

std::pair<double, double> skew_extremes(const std::vector<RoundRecord>& rounds) {
  std::optional<double> lo, hi;
  for (const auto& r : rounds) {
    if (r.rho) lo = lo ? std::min(*lo, *r.rho) : *r.rho;
    if (r.rho_opt) hi = hi ? std::max(*hi, *r.rho_opt) : *r.rho_opt;
  }
  const double bar = lo.value_or(1.0);
  return {bar, hi.value_or(bar)};
}

BoundValue round_envelope(const TheoryContext& ctx, std::size_t round, double delta_start) {
  BoundValue out{delta_start, true};
  const int H = static_cast<int>(ctx.local_steps);
  for (std::size_t s = 0; s < ctx.local_steps; ++s) {
    Theorem1Inputs in{out.value, H, ctx.rho_bar, ctx.rho_tilde, ctx.Gamma,
                      step_rate(ctx.schedule, round, s, ctx.local_steps)};
    const BoundValue next = theorem1_rhs(in, ctx.constants);
    out.value = next.value;
    out.contraction_ok = out.contraction_ok && next.contraction_ok;
  }
  return out;
}

double round_lemma2_rhs(const TheoryContext& ctx, std::size_t round) {
  const std::size_t s = ctx.local_steps > 1 ? ctx.local_steps - 1 : 0;
  const double eta = step_rate(ctx.schedule, round, s, ctx.local_steps);
  return discrepancy_rhs(eta, static_cast<int>(ctx.local_steps), ctx.constants.G2);
}

void annotate_theory(RunResult& run, const Problem& problem, const TheoryConstants& constants) {
  const auto [bar, tilde] = skew_extremes(run.rounds);
  run.rho_bar = bar;
  run.rho_tilde = tilde;
  run.constants = constants;
  if (!constants.convex() || !problem.global || !run.uniform_steps) return;

  TheoryContext ctx;
  ctx.constants = constants;
  ctx.schedule = run.schedule;
  ctx.local_steps = run.local_steps;
  ctx.rho_bar = bar;
  ctx.rho_tilde = tilde;
  ctx.Gamma = std::max(0.0, problem.Gamma.value_or(0.0));

  const int H = static_cast<int>(run.local_steps);
  for (std::size_t k = 0; k + 1 < run.steps.size(); ++k) {
    auto& st = run.steps[k];
    Theorem1Inputs in{st.delta, H, bar, tilde, ctx.Gamma, st.eta};
    st.thm1_next = theorem1_rhs(in, constants).value;
    st.thm1_ok = run.steps[k + 1].delta <= st.thm1_next;
  }
  double delta = *run.delta0;
  for (auto& rec : run.rounds) {
    const BoundValue env = round_envelope(ctx, rec.round, delta);
    rec.thm1_rhs = env.value;
    rec.contraction_ok = env.contraction_ok;
    rec.lemma2_rhs = round_lemma2_rhs(ctx, rec.round);
    if (!rec.lemma2_lhs) rec.lemma2_lhs = 0.0;
    delta = *rec.dist2_to_opt;
  }
}

}  // namespace fedsim
