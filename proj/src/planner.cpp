/*
 Copyright 2026 The sacbp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "sacbp/planner.hpp"

#include <chrono>
#include <cmath>

#include "sacbp/parallel.hpp"

namespace sacbp {

namespace {

double quad_form(const Vec& cu_diag, const Vec& v) {
  return 0.5 * v.cwiseProduct(cu_diag).dot(v);
}

}  // namespace

void PlannerParams::validate() const {
  if (dt_ctrl <= 0.0) throw ConfigError("PlannerParams: dt_ctrl must be positive");
  if (dt_obs <= 0.0) throw ConfigError("PlannerParams: dt_obs must be positive");
  if (!on_grid(dt_obs, dt_ctrl)) {
    throw ConfigError("PlannerParams: dt_obs must be a multiple of dt_ctrl");
  }
  if (!on_grid(horizon, dt_obs)) {
    throw ConfigError("PlannerParams: horizon must be a multiple of dt_obs");
  }
  if (eps < 0.0 || eps >= dt_obs) {
    throw ConfigError("PlannerParams: eps must lie in [0, dt_obs)");
  }
  if (!on_grid(eps, dt_ctrl)) {
    throw ConfigError("PlannerParams: eps must be a multiple of dt_ctrl");
  }
  if (t_calc < 0.0 || t_calc >= dt_obs) {
    throw ConfigError("PlannerParams: t_calc must lie in [0, dt_obs)");
  }
  if (!on_grid(t_calc, dt_ctrl)) {
    throw ConfigError("PlannerParams: t_calc must be a multiple of dt_ctrl");
  }
  if (n_samples < 1) throw ConfigError("PlannerParams: n_samples must be >= 1");
  if (horizon + 1e-12 < dt_obs + t_calc + eps) {
    throw ConfigError("PlannerParams: horizon too short for the search window");
  }
}

double expected_cost_variation(const ScenarioModel& model, const Vec& v,
                               const Vec& x_at_tau, const Vec& u_nom_at_tau,
                               const Vec& mean_rho) {
  const Vec cu = model.control_cost_diagonal();
  const Vec q = model.control_coefficient(x_at_tau).transpose() * mean_rho;
  return quad_form(cu, v) + q.dot(v) -
         (q.dot(u_nom_at_tau) + quad_form(cu, u_nom_at_tau));
}

double expected_cost_variation_at(const ScenarioModel& model,
                                  const Nominal& nominal, const Vec& x0,
                                  double t0, double tau, double dt_ctrl,
                                  double dt_obs, const Vec& mean_rho,
                                  const Vec& v) {
  if (tau >= t0 + dt_obs - 1e-9 * dt_ctrl) {
    throw Error(
        "expected_cost_variation: tau at or after the first observation epoch "
        "(nominal state is stochastic there)");
  }
  const int j_tau = grid_index(tau, t0, dt_ctrl);
  if (j_tau < 1) throw Error("expected_cost_variation: tau before the grid");
  // Deterministic pre-epoch continuation: no jumps can occur before tau.
  Vec x = x0;
  Vec u;
  for (int j = 0; j < j_tau; ++j) {
    if (const auto* sched = std::get_if<ControlSchedule>(&nominal)) {
      u = sched->cell(sched->cell_starting_at(t0 + j * dt_ctrl));
    } else {
      const auto& policy = std::get<std::shared_ptr<const Policy>>(nominal);
      u = model.clamp_control(policy->control(x, t0 + j * dt_ctrl));
    }
    if (j < j_tau - 1) x += dt_ctrl * model.flow(x, u);
  }
  return expected_cost_variation(model, v, x, u, mean_rho);
}

TauGridProblem build_tau_problem(const ScenarioModel& model,
                                 const std::vector<double>& taus,
                                 const std::vector<Vec>& states_at_tau,
                                 const std::vector<Vec>& u_nom_at_tau,
                                 const std::vector<Vec>& mean_rho_at_tau) {
  if (taus.size() != states_at_tau.size() || taus.size() != u_nom_at_tau.size() ||
      taus.size() != mean_rho_at_tau.size()) {
    throw Error("build_tau_problem: size mismatch");
  }
  const Vec cu = model.control_cost_diagonal();
  TauGridProblem p;
  p.taus = taus;
  p.qlin.reserve(taus.size());
  p.qconst.reserve(taus.size());
  p.u_nom = u_nom_at_tau;
  for (size_t k = 0; k < taus.size(); ++k) {
    Vec q = model.control_coefficient(states_at_tau[k]).transpose() *
            mean_rho_at_tau[k];
    p.qconst.push_back(q.dot(u_nom_at_tau[k]) + quad_form(cu, u_nom_at_tau[k]));
    p.qlin.push_back(std::move(q));
  }
  return p;
}

PerturbationResult optimize_perturbation(const ScenarioModel& model,
                                         const TauGridProblem& problem) {
  if (problem.taus.empty()) {
    throw Error("optimize_perturbation: empty tau grid");
  }
  const Vec cu = model.control_cost_diagonal();
  const Vec lo = model.control_lower();
  const Vec hi = model.control_upper();

  PerturbationResult res;
  res.per_tau_curve.reserve(problem.taus.size());
  int best = -1;
  for (size_t k = 0; k < problem.taus.size(); ++k) {
    const Vec& q = problem.qlin[k];
    // Unconstrained minimizer of the separable quadratic, clamped per axis;
    // exact for diagonal C_u.
    const Vec v_star =
        (-q.cwiseQuotient(cu)).cwiseMax(lo).cwiseMin(hi);
    const double nu = quad_form(cu, v_star) + q.dot(v_star) - problem.qconst[k];
    res.per_tau_curve.emplace_back(problem.taus[k], nu, v_star);
    if (best < 0 || nu < std::get<1>(res.per_tau_curve[static_cast<size_t>(best)])) {
      best = static_cast<int>(k);
    }
  }
  const auto& [tau_b, nu_b, v_b] = res.per_tau_curve[static_cast<size_t>(best)];
  res.tau_star = tau_b;
  if (nu_b >= 0.0) {
    // No strictly improving perturbation; keep the nominal control.
    res.no_op = true;
    res.v_star = problem.u_nom[static_cast<size_t>(best)];
    res.nu_star = 0.0;
  } else {
    res.v_star = v_b;
    res.nu_star = nu_b;
  }
  return res;
}

SacbpUpdateResult sacbp_control_update(const ScenarioModel& model, const Vec& x0,
                                       const Nominal& nominal, double t0,
                                       const PlannerParams& params, int epoch) {
  params.validate();
  const double dt = params.dt_ctrl;
  const int jc = static_cast<int>(std::llround(params.t_calc / dt));
  const int je = static_cast<int>(std::llround(params.eps / dt));
  const int jo = static_cast<int>(std::llround(params.dt_obs / dt));
  // Grid points in (t0 + t_calc + eps, t0 + t_calc + dt_obs].
  std::vector<int> tau_cells;
  for (int j = jc + je + 1; j <= jc + jo; ++j) tau_cells.push_back(j);
  if (tau_cells.empty()) {
    throw Error("sacbp_control_update: empty tau grid (eps >= dt_obs)");
  }
  const int n_tau = static_cast<int>(tau_cells.size());
  const int N = params.n_samples;
  const Vec cu = model.control_cost_diagonal();

  struct PerSample {
    bool ok = false;
    std::vector<Vec> w;        // H(x(tau))^T rho(tau)
    std::vector<double> a;     // w^T u_nom + 0.5 u_nom^T C_u u_nom
  };
  std::vector<PerSample> samples(static_cast<size_t>(N));

  parallel_for_indexed(N, resolve_workers(params.workers), [&](int i) {
    PerSample& s = samples[static_cast<size_t>(i)];
    try {
      const HybridTrajectory traj = simulate_nominal(
          model, x0, nominal, t0, params.horizon, params.dt_ctrl, params.dt_obs,
          derive_seed(params.base_seed, static_cast<std::uint64_t>(epoch),
                      static_cast<std::uint64_t>(i)));
      const AdjointTrajectory adj = adjoint_backward(model, traj);
      s.w.reserve(static_cast<size_t>(n_tau));
      s.a.reserve(static_cast<size_t>(n_tau));
      for (int j : tau_cells) {
        const Vec& x_l = traj.states[static_cast<size_t>(j - 1)];
        const Vec& u_j = traj.controls[static_cast<size_t>(j - 1)];
        const Vec& rho = adj.costate_before(j, traj);
        Vec w = model.control_coefficient(x_l).transpose() * rho;
        s.a.push_back(w.dot(u_j) + quad_form(cu, u_j));
        s.w.push_back(std::move(w));
      }
      s.ok = true;
    } catch (const DivergenceError&) {
      s.ok = false;
    } catch (const FilterError&) {
      s.ok = false;
    }
  });

  // Order-fixed reduction over completed samples; failed rollouts are
  // dropped and the mean renormalized.
  int n_eff = 0;
  std::vector<Vec> qlin(static_cast<size_t>(n_tau),
                        Vec::Zero(model.control_dim()));
  std::vector<double> qconst(static_cast<size_t>(n_tau), 0.0);
  for (int i = 0; i < N; ++i) {
    const PerSample& s = samples[static_cast<size_t>(i)];
    if (!s.ok) continue;
    ++n_eff;
    for (int k = 0; k < n_tau; ++k) {
      qlin[static_cast<size_t>(k)] += s.w[static_cast<size_t>(k)];
      qconst[static_cast<size_t>(k)] += s.a[static_cast<size_t>(k)];
    }
  }
  const int n_failed = N - n_eff;
  if (n_eff == 0) throw Error("sacbp_control_update: all rollouts failed");
  if (n_failed * 2 > N) {
    throw Error("sacbp_control_update: more than half of the rollouts failed");
  }
  for (int k = 0; k < n_tau; ++k) {
    qlin[static_cast<size_t>(k)] /= n_eff;
    qconst[static_cast<size_t>(k)] /= n_eff;
  }

  ControlSchedule nominal_sched = nominal_as_schedule(
      model, nominal, x0, t0, params.horizon, params.dt_ctrl);
  TauGridProblem problem;
  problem.qlin = std::move(qlin);
  problem.qconst = std::move(qconst);
  problem.taus.reserve(static_cast<size_t>(n_tau));
  problem.u_nom.reserve(static_cast<size_t>(n_tau));
  for (int j : tau_cells) {
    problem.taus.push_back(t0 + j * dt);
    problem.u_nom.push_back(nominal_sched.cell(j - 1));
  }

  SacbpUpdateResult out{nominal_sched, optimize_perturbation(model, problem),
                        n_eff, n_failed};
  if (!out.perturbation.no_op) {
    out.schedule = perturb_control(nominal_sched, out.perturbation.tau_star,
                                   out.perturbation.v_star, params.eps);
  }
  return out;
}

ModeInsertionCheck mode_insertion_gradient_fd(
    const ScenarioModel& model, const Nominal& nominal, const Vec& x0,
    double t0, double horizon, double dt_ctrl, double dt_obs, double tau,
    const Vec& v, const std::vector<double>& eps_list, int n_mc,
    std::uint64_t seed, int workers) {
  if (n_mc < 1) throw Error("mode_insertion_gradient_fd: n_mc must be >= 1");
  for (double e : eps_list) {
    if (e <= 0.0 || e >= tau - t0) {
      throw Error("mode_insertion_gradient_fd: eps must lie in (0, tau - t0)");
    }
  }
  const size_t n_eps = eps_list.size();
  std::vector<std::vector<double>> fd(n_eps,
                                      std::vector<double>(static_cast<size_t>(n_mc)));
  std::vector<double> nu(static_cast<size_t>(n_mc));

  parallel_for_indexed(n_mc, resolve_workers(workers), [&](int i) {
    const std::uint64_t si = derive_seed(seed, 0, static_cast<std::uint64_t>(i));
    const HybridTrajectory traj =
        simulate_nominal(model, x0, nominal, t0, horizon, dt_ctrl, dt_obs, si);
    const double j0 = total_cost(traj, model);
    const AdjointTrajectory adj = adjoint_backward(model, traj);
    nu[static_cast<size_t>(i)] = nu_from_adjoint(model, traj, adj, tau, v);
    for (size_t e = 0; e < n_eps; ++e) {
      // Common random numbers: the perturbed rollout replays the same seed,
      // so both legs consume identical noise draws.
      const HybridTrajectory pert =
          simulate_nominal(model, x0, nominal, t0, horizon, dt_ctrl, dt_obs, si,
                           Insertion{tau, v, eps_list[e]});
      fd[e][static_cast<size_t>(i)] =
          (total_cost(pert, model) - j0) / eps_list[e];
    }
  });

  auto mean_se = [](const std::vector<double>& xs) {
    const int n = static_cast<int>(xs.size());
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    if (n < 2) return std::pair<double, double>(m, 0.0);
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var /= (n - 1);
    return std::pair<double, double>(m, std::sqrt(var / n));
  };

  ModeInsertionCheck out;
  out.eps_list = eps_list;
  out.n_samples = n_mc;
  std::tie(out.nu_mean, out.nu_se) = mean_se(nu);
  for (size_t e = 0; e < n_eps; ++e) {
    auto [m, se] = mean_se(fd[e]);
    out.fd_mean.push_back(m);
    out.fd_se.push_back(se);
    std::vector<double> diff(static_cast<size_t>(n_mc));
    for (int i = 0; i < n_mc; ++i) {
      diff[static_cast<size_t>(i)] =
          fd[e][static_cast<size_t>(i)] - nu[static_cast<size_t>(i)];
    }
    auto [dm, dse] = mean_se(diff);
    out.diff_mean.push_back(dm);
    out.diff_se.push_back(dse);
  }
  return out;
}

void RunParams::validate() const {
  if (dt_ctrl <= 0.0 || dt_obs <= 0.0) {
    throw ConfigError("RunParams: grid intervals must be positive");
  }
  if (!on_grid(dt_obs, dt_ctrl)) {
    throw ConfigError("RunParams: dt_obs must be a multiple of dt_ctrl");
  }
  if (!on_grid(sim_duration, dt_obs)) {
    throw ConfigError("RunParams: sim_duration must be a multiple of dt_obs");
  }
  if (t_calc < 0.0 || t_calc >= dt_obs || !on_grid(t_calc, dt_ctrl)) {
    throw ConfigError("RunParams: t_calc must be in [0, dt_obs) on the grid");
  }
  if (horizon + 1e-12 < dt_obs + t_calc) {
    throw ConfigError("RunParams: horizon must cover dt_obs + t_calc");
  }
}

RunLog receding_horizon_run(const ScenarioModel& model, ControlUpdater& updater,
                            const RunParams& rp, std::uint64_t world_seed) {
  rp.validate();
  const double dt = rp.dt_ctrl;
  const int cells_per_obs = static_cast<int>(std::llround(rp.dt_obs / dt));
  const int latency_cells = static_cast<int>(std::llround(rp.t_calc / dt));
  const int n_epochs = static_cast<int>(std::llround(rp.sim_duration / rp.dt_obs));

  RunLog log;
  RngEngine rng(derive_seed(world_seed, 0x574f524cULL, 0));
  try {
    Vec world = model.world_init(rng);
    Vec x = model.initial_belief_state(world, rng);
    ControlSchedule prev = updater.initial_schedule(model, x, 0.0);

    auto emit = [&](double t) {
      for (const auto& [name, value] : model.metrics(x, world)) {
        log.rows.push_back({t, name, value});
        log.final_metrics[name] = value;
      }
    };
    emit(0.0);

    for (int k = 0; k < n_epochs; ++k) {
      const double t_k = k * rp.dt_obs;
      const auto tic = std::chrono::steady_clock::now();
      ControlSchedule current = updater.update(model, x, t_k, k);
      const auto toc = std::chrono::steady_clock::now();
      log.update_wall_clock.push_back(
          std::chrono::duration<double>(toc - tic).count());

      Vec u;
      for (int j = 0; j < cells_per_obs; ++j) {
        const double t = t_k + j * dt;
        // The schedule computed at t_k takes effect once t_calc has elapsed.
        const ControlSchedule& active = (j < latency_cells) ? prev : current;
        u = active.cell(active.cell_starting_at(t));
        world = model.world_step(world, u, dt, rng);
        x += dt * model.flow(x, u);
        if (!x.allFinite()) {
          throw DivergenceError("receding_horizon_run: belief diverged");
        }
      }
      const Vec y = model.world_observe(world, u, rng);
      x = model.jump(x, y, u);
      emit(t_k + rp.dt_obs);
      prev = std::move(current);
    }
  } catch (const Error& err) {
    log.failed = true;
    log.failure_reason = err.what();
  }
  return log;
}

SacbpUpdater::SacbpUpdater(PlannerParams params, Nominal nominal_template)
    : params_(std::move(params)), nominal_template_(std::move(nominal_template)) {
  params_.validate();
}

Nominal SacbpUpdater::nominal_at(const ScenarioModel& model, const Vec& x,
                                 double t0) const {
  (void)model;
  (void)x;
  if (const auto* sched = std::get_if<ControlSchedule>(&nominal_template_)) {
    // Re-anchor the template's cell values to this epoch.
    return ControlSchedule(t0, sched->dt(), sched->values(), sched->box_lo(),
                           sched->box_hi());
  }
  return nominal_template_;
}

ControlSchedule SacbpUpdater::initial_schedule(const ScenarioModel& model,
                                               const Vec& x0, double t0) {
  return nominal_as_schedule(model, nominal_at(model, x0, t0), x0, t0,
                             params_.horizon, params_.dt_ctrl);
}

ControlSchedule SacbpUpdater::update(const ScenarioModel& model, const Vec& x,
                                     double t0, int epoch) {
  SacbpUpdateResult res = sacbp_control_update(
      model, x, nominal_at(model, x, t0), t0, params_, epoch);
  last_ = res.perturbation;
  return res.schedule;
}

NominalOnlyUpdater::NominalOnlyUpdater(Nominal nominal_template, double horizon,
                                       double dt_ctrl)
    : nominal_template_(std::move(nominal_template)),
      horizon_(horizon),
      dt_ctrl_(dt_ctrl) {}

ControlSchedule NominalOnlyUpdater::initial_schedule(const ScenarioModel& model,
                                                     const Vec& x0, double t0) {
  return update(model, x0, t0, 0);
}

ControlSchedule NominalOnlyUpdater::update(const ScenarioModel& model,
                                           const Vec& x, double t0, int) {
  if (const auto* sched = std::get_if<ControlSchedule>(&nominal_template_)) {
    return ControlSchedule(t0, sched->dt(), sched->values(), sched->box_lo(),
                           sched->box_hi());
  }
  return nominal_as_schedule(model, nominal_template_, x, t0, horizon_, dt_ctrl_);
}

}  // namespace sacbp
