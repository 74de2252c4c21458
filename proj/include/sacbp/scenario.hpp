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

#ifndef SACBP_SCENARIO_HPP
#define SACBP_SCENARIO_HPP

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sacbp/control_schedule.hpp"
#include "sacbp/types.hpp"

namespace sacbp {

/// Closed-loop control law u = pi(x, t) on the augmented/belief state.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Vec control(const Vec& x, double t) const = 0;
};

/// Nominal control: an open-loop schedule or a closed-loop policy.
using Nominal = std::variant<ControlSchedule, std::shared_ptr<const Policy>>;

enum class AdjointKind {
  kMixed,    // known physical state + discrete-time belief jumps
  kGeneral,  // belief state with continuous prediction between jumps
};

/// A time-driven-switching hybrid system: control-affine continuous flow
/// f(x, u) = drift(x) + H(x) u between observation epochs, a discrete jump
/// x+ = g(x-, y) at each epoch, running cost c(x, u) with an additive
/// quadratic control term, and terminal cost h(x).
///
/// Constructed models are immutable and shareable across workers; every
/// method is const and callable concurrently.
class ScenarioModel {
 public:
  virtual ~ScenarioModel() = default;

  virtual std::string name() const = 0;
  virtual AdjointKind adjoint_kind() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual int observation_dim() const = 0;
  /// Size of the leading physical block p of the augmented state (mixed
  /// observability only; 0 otherwise).
  virtual int physical_dim() const { return 0; }

  // --- continuous flow -----------------------------------------------------
  virtual Vec drift(const Vec& x) const = 0;
  virtual Mat control_coefficient(const Vec& x) const = 0;  // H(x), n x m
  virtual Vec flow(const Vec& x, const Vec& u) const;

  /// d f / d x. Default: central differences of flow at fixed u.
  virtual Mat flow_jacobian(const Vec& x, const Vec& u) const;
  /// (d f/d x)^T rho and (d f/d x) psi. Defaults go through flow_jacobian;
  /// heavy scenarios override with structure-aware versions. Overrides must
  /// be exact transposes of each other.
  virtual Vec flow_vjp(const Vec& x, const Vec& u, const Vec& rho) const;
  virtual Vec flow_jvp(const Vec& x, const Vec& u, const Vec& psi) const;

  // --- observation jump ----------------------------------------------------
  /// Filter update applied at an epoch. u_epoch is the nominal control in
  /// effect at the epoch; models whose observation map is control-free
  /// ignore it.
  virtual Vec jump(const Vec& x_pre, const Vec& y, const Vec& u_epoch) const = 0;
  virtual Mat jump_jacobian(const Vec& x_pre, const Vec& y,
                            const Vec& u_epoch) const;
  virtual Vec jump_vjp(const Vec& x_pre, const Vec& y, const Vec& u_epoch,
                       const Vec& rho) const;
  virtual Vec jump_jvp(const Vec& x_pre, const Vec& y, const Vec& u_epoch,
                       const Vec& psi) const;

  // --- generative observation model ---------------------------------------
  /// Draw the next observation from the current (pre-jump) state: latent
  /// state from the belief, then sensor noise at that latent state.
  virtual Vec sample_observation(const Vec& x_pre, const Vec& u_epoch,
                                 RngEngine& rng) const = 0;
  /// Noiseless observation at the belief mean.
  virtual Vec expected_observation(const Vec& x_pre, const Vec& u_epoch) const = 0;

  // --- costs ---------------------------------------------------------------
  virtual double running_cost(const Vec& x, const Vec& u) const = 0;
  virtual Vec running_cost_gradient(const Vec& x, const Vec& u) const;
  virtual double terminal_cost(const Vec& x) const = 0;
  virtual Vec terminal_cost_gradient(const Vec& x) const;

  virtual Vec control_cost_diagonal() const = 0;  // diagonal of C_u, positive
  virtual Vec control_lower() const = 0;          // saturation box a
  virtual Vec control_upper() const = 0;          // saturation box b

  // --- ground-truth world (harness side) -----------------------------------
  virtual Vec world_init(RngEngine& rng) const = 0;
  virtual Vec initial_belief_state(const Vec& world, RngEngine& rng) const = 0;
  virtual Vec world_step(const Vec& world, const Vec& u, double dt,
                         RngEngine& rng) const = 0;
  virtual Vec world_observe(const Vec& world, const Vec& u,
                            RngEngine& rng) const = 0;
  virtual std::vector<std::pair<std::string, double>> metrics(
      const Vec& belief_state, const Vec& world) const = 0;

  Vec clamp_control(const Vec& u) const;
};

/// max over `n_probes` random (x, u) of
/// ||f(x,u) - f(x,0) - H(x) u|| / (1 + ||f(x,u)||); the control-affinity
/// probe. States are drawn around `x_ref` with the given spread.
double control_affinity_residual(const ScenarioModel& model, const Vec& x_ref,
                                 double spread, int n_probes,
                                 std::uint64_t seed);

/// Residual of the quadratic-control-cost structure:
/// max |c(x,u) - c(x,0) - 0.5 u^T C_u u| over random probes.
double control_cost_residual(const ScenarioModel& model, const Vec& x_ref,
                             double spread, int n_probes, std::uint64_t seed);

}  // namespace sacbp

#endif  // SACBP_SCENARIO_HPP
