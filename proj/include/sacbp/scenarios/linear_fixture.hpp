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

#ifndef SACBP_SCENARIOS_LINEAR_FIXTURE_HPP
#define SACBP_SCENARIOS_LINEAR_FIXTURE_HPP

#include <memory>

#include "sacbp/scenarios/gaussian_belief_scenario.hpp"

namespace sacbp::scenarios {

/// Linear time-invariant system xdot = A x + B u + w, y = C x + v.
class LinearSystemModel : public GaussianSystemModel {
 public:
  LinearSystemModel(Mat a, Mat b, Mat c, Mat q, Mat r);
  int dim() const override { return static_cast<int>(a_.rows()); }
  int control_dim() const override { return static_cast<int>(b_.cols()); }
  int obs_dim() const override { return static_cast<int>(c_.rows()); }
  Vec f_sys(const Vec& x, const Vec& u) const override { return a_ * x + b_ * u; }
  Mat jacobian(const Vec&, const Vec&) const override { return a_; }
  Mat process_noise() const override { return q_; }
  Vec observe(const Vec& x, const Vec&) const override { return c_ * x; }
  Mat obs_jacobian(const Vec&, const Vec&) const override { return c_; }
  Mat obs_noise() const override { return r_; }

 private:
  Mat a_, b_, c_, q_, r_;
};

/// Random stable linear-Gaussian belief scenario: exact KF available as an
/// oracle, quadratic costs. The workhorse fixture for the adjoint, filter
/// equivalence, and mode-insertion suites.
std::shared_ptr<GaussianBeliefScenario> make_linear_fixture(
    int dim, std::uint64_t seed, bool deterministic_observations = false);

/// 1D mixed-observability fixture: a scalar robot p with flow
/// pdot = a_p p + u (deterministic, fully observed) tracking a scalar
/// Brownian target with a Kalman belief (mu, s). Observations y = q + noise
/// with variance r0 + r1 (mu - p)^2 arrive every dt_obs; the jump is the
/// predict-update recursion with the noise variance evaluated at the prior
/// mean. r1 > 0 couples the jump to the robot state; r1 = 0 reduces to the
/// plain scalar Kalman filter.
struct Linear1dMixedConfig {
  double a_p = -0.5;        // robot flow pdot = a_p p + u
  double dt_obs = 0.2;      // fixed observation interval (predict step size)
  double q_proc = 0.1;      // Brownian target intensity
  double r0 = 0.04;         // nominal observation noise variance
  double r1 = 0.02;         // range-dependent noise growth
  double control_cost = 0.2;  // C_u (scalar)
  double w_mu = 0.1;        // running cost weight on mu^2
  double w_s = 0.5;         // running cost weight on s
  double h_p = 1.0;         // terminal weight on (p - mu)^2
  double h_s = 2.0;         // terminal weight on s
  double p0 = 0.3;
  double mu0 = 1.0;
  double s0 = 1.0;
  double u_lo = -2.0;
  double u_hi = 2.0;
  bool deterministic = false;  // noiseless latent and observations
};

class Linear1dMixedScenario : public ScenarioModel {
 public:
  explicit Linear1dMixedScenario(Linear1dMixedConfig cfg) : cfg_(cfg) {}

  std::string name() const override { return "linear1d_mixed"; }
  AdjointKind adjoint_kind() const override { return AdjointKind::kMixed; }
  int state_dim() const override { return 3; }  // (p, mu, s)
  int control_dim() const override { return 1; }
  int observation_dim() const override { return 1; }
  int physical_dim() const override { return 1; }

  Vec drift(const Vec& x) const override;
  Mat control_coefficient(const Vec& x) const override;
  Mat flow_jacobian(const Vec& x, const Vec& u) const override;

  Vec jump(const Vec& x_pre, const Vec& y, const Vec& u_epoch) const override;
  Mat jump_jacobian(const Vec& x_pre, const Vec& y,
                    const Vec& u_epoch) const override;

  Vec sample_observation(const Vec& x_pre, const Vec& u_epoch,
                         RngEngine& rng) const override;
  Vec expected_observation(const Vec& x_pre, const Vec& u_epoch) const override;

  double running_cost(const Vec& x, const Vec& u) const override;
  Vec running_cost_gradient(const Vec& x, const Vec& u) const override;
  double terminal_cost(const Vec& x) const override;
  Vec terminal_cost_gradient(const Vec& x) const override;

  Vec control_cost_diagonal() const override {
    return Vec::Constant(1, cfg_.control_cost);
  }
  Vec control_lower() const override { return Vec::Constant(1, cfg_.u_lo); }
  Vec control_upper() const override { return Vec::Constant(1, cfg_.u_hi); }

  Vec world_init(RngEngine& rng) const override;
  Vec initial_belief_state(const Vec& world, RngEngine& rng) const override;
  Vec world_step(const Vec& world, const Vec& u, double dt,
                 RngEngine& rng) const override;
  Vec world_observe(const Vec& world, const Vec& u,
                    RngEngine& rng) const override;
  std::vector<std::pair<std::string, double>> metrics(
      const Vec& belief_state, const Vec& world) const override;

  const Linear1dMixedConfig& config() const { return cfg_; }

 private:
  Linear1dMixedConfig cfg_;
};

}  // namespace sacbp::scenarios

#endif  // SACBP_SCENARIOS_LINEAR_FIXTURE_HPP
