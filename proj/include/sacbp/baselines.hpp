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

#ifndef SACBP_BASELINES_HPP
#define SACBP_BASELINES_HPP

#include <memory>

#include "sacbp/planner.hpp"
#include "sacbp/scenario.hpp"

namespace sacbp {

// ---------------------------------------------------------------------------
// Greedy terminal-cost descent.
// ---------------------------------------------------------------------------

struct GreedyParams {
  double dt_obs = 0.2;
  double dt_ctrl = 0.01;
  double eta0 = 1.0;      // initial step size
  int max_halvings = 10;  // backtracking budget
};

/// One-step lookahead objective: hold u for dt_obs of flow, apply the
/// expected (noiseless) observation update at the reached state, evaluate h.
double greedy_objective(const ScenarioModel& model, const Vec& x, const Vec& u,
                        const GreedyParams& gp);

/// Gradient of the lookahead objective at u = 0, via the chain rule through
/// the flow+update composite (numeric composite Jacobian dotted with the
/// analytic terminal-cost gradient).
Vec greedy_gradient(const ScenarioModel& model, const Vec& x,
                    const GreedyParams& gp);

/// u = clamp(-eta * gradient), eta backtracked from eta0 by halving until
/// the objective decreases; returns zero control when no step improves.
Vec greedy_control(const ScenarioModel& model, const Vec& x,
                   const GreedyParams& gp);

// ---------------------------------------------------------------------------
// MCTS with double progressive widening in the belief space.
// ---------------------------------------------------------------------------

struct DPWParams {
  int n_queries = 25;
  int depth = 10;        // dt_obs steps
  double c_ucb = 1.0;
  double k_action = 10.0;
  double alpha_action = 0.5;
  double k_state = 4.0;
  double alpha_state = 0.25;
  double gamma = 0.95;   // discount per dt_obs step
  double dt_obs = 0.2;
  double dt_ctrl = 0.01;
  std::shared_ptr<const Policy> rollout_policy;  // nullptr: zero control

  void validate() const;
};

/// Tree search over dt_obs-discretized belief transitions with progressive
/// widening on both the action and the observation branching. Actions are
/// sampled uniformly in the saturation box; the step reward is the negative
/// running-cost integral, with -h at the leaves. Returns the root action
/// with the highest visit count. Deterministic given the seed.
Vec mcts_dpw_plan(const ScenarioModel& model, const Vec& x,
                  const DPWParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Manipulation position controller.
// ---------------------------------------------------------------------------

struct PositionControllerGains {
  double kp_force = 4.0;
  double kd_force = 5.0;
  double kp_torque = 1.5;
  double kd_torque = 1.2;
};

/// PD law on the mean pose estimate toward the origin, mapped to
/// (F_x, F_y, M) and clamped to the box. Reads the leading
/// (r, theta, v, omega) block of the belief mean.
class PositionController : public Policy {
 public:
  PositionController(PositionControllerGains gains, Vec box_lo, Vec box_hi);
  Vec control(const Vec& x, double t) const override;

 private:
  PositionControllerGains gains_;
  Vec box_lo_;
  Vec box_hi_;
};

// ---------------------------------------------------------------------------
// Harness adapters.
// ---------------------------------------------------------------------------

class GreedyUpdater : public ControlUpdater {
 public:
  GreedyUpdater(GreedyParams params, double horizon);
  std::string id() const override { return "greedy"; }
  ControlSchedule initial_schedule(const ScenarioModel& model, const Vec& x0,
                                   double t0) override;
  ControlSchedule update(const ScenarioModel& model, const Vec& x, double t0,
                         int epoch) override;

 private:
  GreedyParams params_;
  double horizon_;
};

class MctsDpwUpdater : public ControlUpdater {
 public:
  MctsDpwUpdater(DPWParams params, double horizon, std::uint64_t base_seed);
  std::string id() const override { return "mcts_dpw"; }
  ControlSchedule initial_schedule(const ScenarioModel& model, const Vec& x0,
                                   double t0) override;
  ControlSchedule update(const ScenarioModel& model, const Vec& x, double t0,
                         int epoch) override;

 private:
  DPWParams params_;
  double horizon_;
  std::uint64_t base_seed_;
};

}  // namespace sacbp

#endif  // SACBP_BASELINES_HPP
