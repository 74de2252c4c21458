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

#ifndef SACBP_SCENARIOS_GAUSSIAN_BELIEF_SCENARIO_HPP
#define SACBP_SCENARIOS_GAUSSIAN_BELIEF_SCENARIO_HPP

#include <memory>
#include <string>

#include "sacbp/filters.hpp"
#include "sacbp/scenario.hpp"

namespace sacbp::scenarios {

/// General belief-space scenario over a continuous-discrete EKF: the state
/// is the belief vector b = (mu, vec(Sigma)), the flow is the prediction ODE
///   mu_dot = f_sys(mu, u),  Sigma_dot = A Sigma + Sigma A^T + Q,
/// and the jump is the EKF innovation update. Control affinity of f_sys
/// carries over to the belief flow (A is affine in u), which this class
/// exploits to expose the control coefficient of the full belief dynamics.
///
/// Costs are quadratic in the underlying state, taken in expectation:
///   c(b, u) = 0.5 mu^T C_x mu + 0.5 tr(C_x Sigma) + 0.5 u^T C_u u,
/// with the terminal cost identical minus the control term.
///
/// Flow and jump adjoint/variational actions are structure-aware: the
/// covariance pathways use closed-form matrix calculus (the EKF update maps
/// covariance directions as M dSigma M^T with M = I - KC), while the
/// mean-direction sensitivities of A and C come from central differences of
/// the analytic Jacobians.
class GaussianBeliefScenario : public ScenarioModel {
 public:
  GaussianBeliefScenario(std::string name,
                         std::shared_ptr<const GaussianSystemModel> sys,
                         Mat state_cost, Vec control_cost_diag, Vec box_lo,
                         Vec box_hi, bool deterministic_observations = false);

  std::string name() const override { return name_; }
  AdjointKind adjoint_kind() const override { return AdjointKind::kGeneral; }
  int state_dim() const override { return n_ + n_ * n_; }
  int control_dim() const override { return sys_->control_dim(); }
  int observation_dim() const override { return sys_->obs_dim(); }

  Vec drift(const Vec& x) const override;
  Mat control_coefficient(const Vec& x) const override;
  Vec flow(const Vec& x, const Vec& u) const override;
  Vec flow_vjp(const Vec& x, const Vec& u, const Vec& rho) const override;
  Vec flow_jvp(const Vec& x, const Vec& u, const Vec& psi) const override;

  Vec jump(const Vec& x_pre, const Vec& y, const Vec& u_epoch) const override;
  Vec jump_vjp(const Vec& x_pre, const Vec& y, const Vec& u_epoch,
               const Vec& rho) const override;
  Vec jump_jvp(const Vec& x_pre, const Vec& y, const Vec& u_epoch,
               const Vec& psi) const override;

  Vec sample_observation(const Vec& x_pre, const Vec& u_epoch,
                         RngEngine& rng) const override;
  Vec expected_observation(const Vec& x_pre, const Vec& u_epoch) const override;

  double running_cost(const Vec& x, const Vec& u) const override;
  Vec running_cost_gradient(const Vec& x, const Vec& u) const override;
  double terminal_cost(const Vec& x) const override;
  Vec terminal_cost_gradient(const Vec& x) const override;

  Vec control_cost_diagonal() const override { return cu_diag_; }
  Vec control_lower() const override { return box_lo_; }
  Vec control_upper() const override { return box_hi_; }

  // Generic world: the underlying state evolves by f_sys with per-step
  // process noise; observations come from the true state. Subclasses with a
  // richer ground truth override these.
  Vec world_init(RngEngine& rng) const override;
  Vec initial_belief_state(const Vec& world, RngEngine& rng) const override;
  Vec world_step(const Vec& world, const Vec& u, double dt,
                 RngEngine& rng) const override;
  Vec world_observe(const Vec& world, const Vec& u,
                    RngEngine& rng) const override;
  std::vector<std::pair<std::string, double>> metrics(
      const Vec& belief_state, const Vec& world) const override;

  const GaussianSystemModel& system() const { return *sys_; }
  GaussianBelief unpack(const Vec& x) const {
    return GaussianBelief::unpack(x, n_);
  }

  /// Initial belief used by initial_belief_state; defaults to zero mean and
  /// identity covariance, overridden by concrete scenarios.
  virtual GaussianBelief initial_belief() const;

 protected:
  std::string name_;
  std::shared_ptr<const GaussianSystemModel> sys_;
  int n_;
  Mat state_cost_;  // C_x
  Vec cu_diag_;
  Vec box_lo_;
  Vec box_hi_;
  bool deterministic_obs_;

 private:
  /// d A / d mu_j by central differences of the analytic Jacobian.
  std::vector<Mat> jacobian_mean_sensitivity(const Vec& mu, const Vec& u) const;
  /// d C / d mu_j by central differences of the analytic observation Jacobian.
  std::vector<Mat> obs_jacobian_mean_sensitivity(const Vec& mu,
                                                 const Vec& u) const;
};

}  // namespace sacbp::scenarios

#endif  // SACBP_SCENARIOS_GAUSSIAN_BELIEF_SCENARIO_HPP
