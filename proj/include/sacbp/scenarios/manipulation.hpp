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

#ifndef SACBP_SCENARIOS_MANIPULATION_HPP
#define SACBP_SCENARIOS_MANIPULATION_HPP

#include <memory>

#include "sacbp/scenarios/gaussian_belief_scenario.hpp"

namespace sacbp::scenarios {

/// Planar rigid-body manipulation under model uncertainty. A robot rigidly
/// attached to the object applies a world-frame force and a torque
/// u = (F_x, F_y, M) to bring the object to the origin. The object's mass,
/// moment of inertia, attachment arm, and linear friction coefficient are
/// unknown and estimated jointly with the motion state by a
/// continuous-discrete EKF from noisy position / velocity / acceleration
/// readings of the attachment point.
///
/// Underlying state (11): r(2), theta, v(2), omega, log m, log I_z,
/// arm r_a(2), log c_f. Log parameterization keeps the physical parameters
/// positive and the dynamics control-affine:
///   vdot = e^{-log m} (F - e^{log c_f} v)
///   omegadot = e^{-log I} (M + r_ax F_y - r_ay F_x).
struct ManipulationConfig {
  // Ground-truth parameters.
  double mass = 2.0;
  double inertia = 0.5;
  Eigen::Vector2d arm{0.15, 0.05};
  double friction = 0.8;
  // Initial belief over the parameters (log-space mean offsets from truth
  // would be cheating; these are independent initial guesses).
  double mass_guess = 1.0;
  double inertia_guess = 0.25;
  Eigen::Vector2d arm_guess{0.0, 0.0};
  double friction_guess = 0.4;
  double param_cov0 = 0.25;  // initial variance of the log / arm parameters
  double state_cov0 = 0.01;  // initial variance of the motion state
  // Initial object state.
  Eigen::Vector2d r0{1.5, 1.0};
  double theta0 = 0.5;
  // Sensor noise standard deviations (attachment-point readings).
  double pos_noise = 0.01;
  double vel_noise = 0.02;
  double acc_noise = 0.05;
  // Process noise.
  double q_state = 1e-4;
  double q_param = 1e-6;
  // Costs: C_x = diag(pos, pos, angle, vel, vel, omega, 0...0).
  double pos_weight = 10.0;
  double angle_weight = 1.0;
  double vel_weight = 1.0;
  double omega_weight = 1.0;
  double control_weight = 0.2;  // C_u = w I_3
  // Saturation box.
  double force_limit = 6.0;
  double torque_limit = 3.0;
  bool deterministic = false;
};

class RigidBodySystemModel : public GaussianSystemModel {
 public:
  explicit RigidBodySystemModel(const ManipulationConfig& cfg);
  int dim() const override { return 11; }
  int control_dim() const override { return 3; }
  int obs_dim() const override { return 6; }
  Vec f_sys(const Vec& x, const Vec& u) const override;
  Mat jacobian(const Vec& x, const Vec& u) const override;
  Mat process_noise() const override { return q_; }
  Vec observe(const Vec& x, const Vec& u) const override;
  Mat obs_jacobian(const Vec& x, const Vec& u) const override;
  Mat obs_noise() const override { return r_; }

 private:
  Mat q_;
  Mat r_;
};

class ManipulationScenario : public GaussianBeliefScenario {
 public:
  explicit ManipulationScenario(ManipulationConfig cfg);

  std::string name() const override { return "manipulation"; }

  GaussianBelief initial_belief() const override;
  Vec world_init(RngEngine& rng) const override;
  Vec world_step(const Vec& world, const Vec& u, double dt,
                 RngEngine& rng) const override;
  std::vector<std::pair<std::string, double>> metrics(
      const Vec& belief_state, const Vec& world) const override;

  const ManipulationConfig& config() const { return cfg_; }
  /// Full 11-dim true state: physical state plus the true parameters.
  Vec true_parameters_tail() const;

 private:
  ManipulationConfig cfg_;
};

std::shared_ptr<ManipulationScenario> make_manipulation_scenario(
    const ManipulationConfig& cfg);

}  // namespace sacbp::scenarios

#endif  // SACBP_SCENARIOS_MANIPULATION_HPP
