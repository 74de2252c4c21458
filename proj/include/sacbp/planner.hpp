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

#ifndef SACBP_PLANNER_HPP
#define SACBP_PLANNER_HPP

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "sacbp/adjoint.hpp"
#include "sacbp/hybrid.hpp"
#include "sacbp/scenario.hpp"
#include "sacbp/types.hpp"

namespace sacbp {

struct PlannerParams {
  double horizon = 2.0;   // t_f - t_0
  double dt_obs = 0.2;    // observation / replanning interval
  double dt_ctrl = 0.01;  // integration and control grid
  double eps = 0.16;      // perturbation duration
  int n_samples = 10;     // Monte Carlo rollouts per update
  double t_calc = 0.15;   // simulated computation latency
  std::uint64_t base_seed = 0;
  int workers = 1;  // parallel rollout workers (<=0: SACBP_WORKERS env, else 1)

  void validate() const;
};

/// Outcome of the per-epoch perturbation optimization.
struct PerturbationResult {
  double tau_star = 0.0;
  Vec v_star;
  double nu_star = 0.0;
  /// (tau, nu*(tau), v*(tau)) for every tau on the search grid.
  std::vector<std::tuple<double, double, Vec>> per_tau_curve;
  /// True when no strictly negative nu* existed and the nominal schedule was
  /// kept unchanged.
  bool no_op = false;
};

/// Expected first-order cost variation of inserting v at tau:
///   0.5 v^T C_u v + mean_rho^T H(x) (v - u_nom) - 0.5 u_nom^T C_u u_nom,
/// with x and u_nom the deterministic nominal state and control at tau.
double expected_cost_variation(const ScenarioModel& model, const Vec& v,
                               const Vec& x_at_tau, const Vec& u_nom_at_tau,
                               const Vec& mean_rho);

/// As above, but derives x(tau) and u_nom(tau) by flowing x0 deterministically
/// from t0 under the nominal. Throws Error when tau is at or after the first
/// observation epoch t0 + dt_obs, where the nominal state becomes stochastic.
double expected_cost_variation_at(const ScenarioModel& model,
                                  const Nominal& nominal, const Vec& x0,
                                  double t0, double tau, double dt_ctrl,
                                  double dt_obs, const Vec& mean_rho,
                                  const Vec& v);

/// Per-tau quadratic minimization data. nu(v; tau) = 0.5 v^T C_u v +
/// qlin^T v - qconst, assembled from the Monte Carlo reduction (or directly
/// from a mean costate trajectory for the deterministic pre-epoch window).
struct TauGridProblem {
  std::vector<double> taus;
  std::vector<Vec> qlin;
  std::vector<double> qconst;
  std::vector<Vec> u_nom;  // nominal control of the returned schedule at tau
};

/// Builds the QP data from a mean costate trajectory sampled on the tau grid:
/// qlin = H(x)^T mean_rho, qconst = qlin^T u_nom + 0.5 u_nom^T C_u u_nom.
TauGridProblem build_tau_problem(const ScenarioModel& model,
                                 const std::vector<double>& taus,
                                 const std::vector<Vec>& states_at_tau,
                                 const std::vector<Vec>& u_nom_at_tau,
                                 const std::vector<Vec>& mean_rho_at_tau);

/// Solves min_v nu(v; tau) subject to the saturation box for every tau on
/// the grid. C_u diagonal makes the box-constrained minimizer an elementwise
/// clamp of -C_u^{-1} qlin. Returns the global argmin over tau; ties break
/// to the smallest tau, and a nonnegative optimum collapses to a no-op that
/// keeps the nominal control.
PerturbationResult optimize_perturbation(const ScenarioModel& model,
                                         const TauGridProblem& problem);

struct SacbpUpdateResult {
  ControlSchedule schedule;
  PerturbationResult perturbation;
  int n_effective = 0;  // Monte Carlo samples that completed
  int n_failed = 0;     // rollouts dropped after divergence
};

/// One SACBP control update: N seeded forward rollouts, N backward adjoint
/// passes, Monte Carlo averaging of the costate-derived QP coefficients on
/// the tau grid (t0 + t_calc + eps, t0 + t_calc + dt_obs], quadratic
/// minimization, and perturbation of the nominal schedule. Deterministic
/// given (model, x0, nominal, params, epoch): rollout i uses
/// derive_seed(base_seed, epoch, i) regardless of worker scheduling.
SacbpUpdateResult sacbp_control_update(const ScenarioModel& model, const Vec& x0,
                                       const Nominal& nominal, double t0,
                                       const PlannerParams& params, int epoch);

// ---------------------------------------------------------------------------
// Mode-insertion-gradient verification (finite differences vs adjoint).
// ---------------------------------------------------------------------------

struct ModeInsertionCheck {
  std::vector<double> eps_list;
  std::vector<double> fd_mean;    // mean over samples of (J_eps - J)/eps
  std::vector<double> fd_se;      // standard error of the above
  std::vector<double> diff_mean;  // mean of (fd_i - nu_i), common random numbers
  std::vector<double> diff_se;    // standard error of the difference
  double nu_mean = 0.0;           // adjoint-based estimate from the same samples
  double nu_se = 0.0;
  int n_samples = 0;
};

/// For each eps, estimates E[J(u^eps)] - E[J(u)] with common random numbers
/// (the perturbed and nominal rollouts of sample i share one seed), divides
/// by eps, and returns the adjoint-based E[nu] from the same sample set.
ModeInsertionCheck mode_insertion_gradient_fd(
    const ScenarioModel& model, const Nominal& nominal, const Vec& x0,
    double t0, double horizon, double dt_ctrl, double dt_obs, double tau,
    const Vec& v, const std::vector<double>& eps_list, int n_mc,
    std::uint64_t seed, int workers = 1);

// ---------------------------------------------------------------------------
// Receding-horizon execution.
// ---------------------------------------------------------------------------

/// Per-epoch replanner driven by the receding-horizon loop.
class ControlUpdater {
 public:
  virtual ~ControlUpdater() = default;
  virtual std::string id() const = 0;
  /// Schedule applied before the first update becomes available.
  virtual ControlSchedule initial_schedule(const ScenarioModel& model,
                                           const Vec& x0, double t0) = 0;
  /// Called right after the epoch's filter update with the posterior state.
  virtual ControlSchedule update(const ScenarioModel& model, const Vec& x,
                                 double t0, int epoch) = 0;
};

struct RunParams {
  double sim_duration = 0.0;
  double dt_ctrl = 0.01;
  double dt_obs = 0.2;
  double t_calc = 0.15;
  double horizon = 2.0;  // span of returned schedules

  void validate() const;
};

struct MetricsRow {
  double t;
  std::string metric;
  double value;
};

struct RunLog {
  std::vector<MetricsRow> rows;
  std::map<std::string, double> final_metrics;
  std::vector<double> update_wall_clock;  // seconds, one per control update
  bool failed = false;
  std::string failure_reason;
};

/// Alternates ground-truth stepping, observation generation, filter update,
/// and replanning. The schedule computed at t_k takes effect at t_k + t_calc;
/// until then the previous schedule keeps running. Wall clock is logged per
/// update but never written into the metric rows, which stay deterministic.
RunLog receding_horizon_run(const ScenarioModel& model, ControlUpdater& updater,
                            const RunParams& rp, std::uint64_t world_seed);

/// SACBP replanner: rebuilds the nominal every epoch (a fixed schedule shifted
/// to the epoch, or a closed-loop policy materialized from the current state)
/// and applies the optimized perturbation to it.
class SacbpUpdater : public ControlUpdater {
 public:
  SacbpUpdater(PlannerParams params, Nominal nominal_template);
  std::string id() const override { return "sacbp"; }
  ControlSchedule initial_schedule(const ScenarioModel& model, const Vec& x0,
                                   double t0) override;
  ControlSchedule update(const ScenarioModel& model, const Vec& x, double t0,
                         int epoch) override;
  const PerturbationResult& last_perturbation() const { return last_; }

 private:
  Nominal nominal_at(const ScenarioModel& model, const Vec& x, double t0) const;
  PlannerParams params_;
  Nominal nominal_template_;  // schedule values are re-anchored to each epoch
  PerturbationResult last_;
};

/// Applies the nominal unchanged (baseline "nominal_only").
class NominalOnlyUpdater : public ControlUpdater {
 public:
  NominalOnlyUpdater(Nominal nominal_template, double horizon, double dt_ctrl);
  std::string id() const override { return "nominal_only"; }
  ControlSchedule initial_schedule(const ScenarioModel& model, const Vec& x0,
                                   double t0) override;
  ControlSchedule update(const ScenarioModel& model, const Vec& x, double t0,
                         int epoch) override;

 private:
  Nominal nominal_template_;
  double horizon_;
  double dt_ctrl_;
};

}  // namespace sacbp

#endif  // SACBP_PLANNER_HPP
