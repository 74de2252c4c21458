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

#ifndef SACBP_SCENARIOS_TRACKING_HPP
#define SACBP_SCENARIOS_TRACKING_HPP

#include <memory>

#include "sacbp/filters.hpp"
#include "sacbp/scenario.hpp"

namespace sacbp::scenarios {

/// Active multi-target tracking with range-only observations. The robot is
/// a single integrator whose position is fully observed; each target is an
/// independent 2D Brownian motion estimated by a discrete-time UKF with the
/// state-dependent noise model R(p, q) = R0 + ||q - p|| R1. Running cost is
/// pure control effort; the terminal cost sums the exponentiated entropies
/// of the target beliefs.
struct TrackingConfig {
  int n_targets = 5;
  double dt_obs = 0.2;  // observation interval baked into the UKF predict
  Mat process_noise = 0.1 * Mat::Identity(2, 2);   // Q
  Mat noise_floor = 0.01 * Mat::Identity(2, 2);    // R0
  Mat noise_slope = 0.001 * Mat::Identity(2, 2);   // R1
  double control_cost_weight = 0.05;  // c = w u^T u  (C_u = 2w I)
  double speed_limit = 2.0;           // box [-limit, limit]^2
  Eigen::Vector2d cluster_a{8.0, 8.0};
  Eigen::Vector2d cluster_b{-8.0, -8.0};
  double cluster_spread = 2.0;
  double initial_cov = 1.0;  // per-target initial covariance (x identity)
  Eigen::Vector2d robot_start{0.0, 0.0};
  UkfParams ukf;
  bool deterministic = false;  // noiseless fixture mode
};

class TrackingScenario : public ScenarioModel {
 public:
  explicit TrackingScenario(TrackingConfig cfg);

  std::string name() const override { return "tracking"; }
  AdjointKind adjoint_kind() const override { return AdjointKind::kMixed; }
  int state_dim() const override { return 2 + 6 * cfg_.n_targets; }
  int control_dim() const override { return 2; }
  int observation_dim() const override { return cfg_.n_targets; }
  int physical_dim() const override { return 2; }

  Vec drift(const Vec& x) const override;
  Mat control_coefficient(const Vec& x) const override;
  Mat flow_jacobian(const Vec& x, const Vec& u) const override;
  Vec flow_vjp(const Vec& x, const Vec& u, const Vec& rho) const override;
  Vec flow_jvp(const Vec& x, const Vec& u, const Vec& psi) const override;

  Vec jump(const Vec& x_pre, const Vec& y, const Vec& u_epoch) const override;
  Mat jump_jacobian(const Vec& x_pre, const Vec& y,
                    const Vec& u_epoch) const override;
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

  Vec control_cost_diagonal() const override {
    return Vec::Constant(2, 2.0 * cfg_.control_cost_weight);
  }
  Vec control_lower() const override {
    return Vec::Constant(2, -cfg_.speed_limit);
  }
  Vec control_upper() const override {
    return Vec::Constant(2, cfg_.speed_limit);
  }

  Vec world_init(RngEngine& rng) const override;
  Vec initial_belief_state(const Vec& world, RngEngine& rng) const override;
  Vec world_step(const Vec& world, const Vec& u, double dt,
                 RngEngine& rng) const override;
  Vec world_observe(const Vec& world, const Vec& u,
                    RngEngine& rng) const override;
  std::vector<std::pair<std::string, double>> metrics(
      const Vec& belief_state, const Vec& world) const override;

  const TrackingConfig& config() const { return cfg_; }
  GaussianBelief target_belief(const Vec& x, int i) const;

 private:
  /// One target's UKF step packed as a function of (p, mu_i, vec(Sigma_i)).
  Vec target_jump(const Eigen::Vector2d& p, const Vec& block, double y) const;
  /// 6x8 Jacobian of target_jump w.r.t. (p, mu, vec(Sigma)) by central
  /// differences; the multi-target jump is block-diagonal over targets apart
  /// from the shared robot columns.
  Mat target_jump_jacobian(const Eigen::Vector2d& p, const Vec& block,
                           double y) const;

  TrackingConfig cfg_;
  Mat chol_q_;  // Cholesky factor of Q for world stepping
};

std::shared_ptr<TrackingScenario> make_tracking_scenario(
    const TrackingConfig& cfg);

}  // namespace sacbp::scenarios

#endif  // SACBP_SCENARIOS_TRACKING_HPP
