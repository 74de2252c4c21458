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

#ifndef SACBP_HYBRID_HPP
#define SACBP_HYBRID_HPP

#include <optional>
#include <vector>

#include "sacbp/scenario.hpp"
#include "sacbp/types.hpp"

namespace sacbp {

/// Integration grid over one planning horizon. Observation epochs land on
/// the control grid: dt_obs is an integer multiple of dt_ctrl and the
/// horizon an integer multiple of dt_obs.
struct TimeGrid {
  double t0 = 0.0;
  double dt_ctrl = 0.0;
  double dt_obs = 0.0;
  double horizon = 0.0;
  int n_cells = 0;
  int cells_per_obs = 0;

  TimeGrid() = default;
  TimeGrid(double t0_, double dt_ctrl_, double dt_obs_, double horizon_);

  double time_at(int j) const { return t0 + j * dt_ctrl; }
  int index_of(double t) const { return grid_index(t, t0, dt_ctrl); }
  bool is_epoch_index(int j) const {
    return j > 0 && cells_per_obs > 0 && j % cells_per_obs == 0;
  }
  int n_jumps() const { return cells_per_obs > 0 ? n_cells / cells_per_obs : 0; }
};

/// Control insertion: value v in effect on (tau - eps, tau]. Realized in the
/// integrator by convex blending of the two vector fields on partially
/// covered cells, which keeps the cost's right derivative in eps exactly
/// equal to the adjoint-based first-order variation.
struct Insertion {
  double tau = 0.0;
  Vec v;
  double eps = 0.0;
};

/// Simulated path of the hybrid system. states[j] is the post-jump state at
/// grid index j; pre-jump left limits, observations, and the control in
/// effect at each epoch are recorded per jump.
struct HybridTrajectory {
  TimeGrid grid;
  std::vector<Vec> states;           // n_cells + 1
  std::vector<Vec> controls;         // n_cells, control of the step starting at j
  std::vector<int> jump_indices;     // ascending epoch grid indices
  std::vector<Vec> pre_jump_states;  // x(t_k^-) per jump
  std::vector<Vec> observations;     // y_k per jump
  std::vector<Vec> epoch_controls;   // nominal control in effect at t_k
  std::vector<double> running_cost_accum;  // n_cells + 1, left-Riemann sum

  const Vec& final_state() const { return states.back(); }
  /// Ordinal of the jump at grid index j, or -1 when j is not an epoch.
  int jump_ordinal(int j) const;
};

/// Explicit-Euler path of the continuous flow only (no jumps) from t0 to t1
/// on the schedule's grid. Both endpoints must be grid-aligned.
std::vector<Vec> euler_flow(const ScenarioModel& model, const Vec& x0,
                            const ControlSchedule& schedule, double t0,
                            double t1);

/// Forward-simulates the nominal hybrid trajectory over `horizon` seconds:
/// Euler flow between epochs, sampled observation and jump at every dt_obs.
/// A pure function of its arguments (given rng_seed). With a Policy nominal
/// the control of each cell is the policy evaluated at the current state.
HybridTrajectory simulate_nominal(const ScenarioModel& model, const Vec& x0,
                                  const Nominal& nominal, double t0,
                                  double horizon, double dt_ctrl, double dt_obs,
                                  std::uint64_t rng_seed,
                                  const std::optional<Insertion>& insertion =
                                      std::nullopt);

/// Total cost of a complete trajectory: accumulated running cost plus the
/// terminal cost at the final (post-jump) state.
double total_cost(const HybridTrajectory& traj, const ScenarioModel& model);

/// Left-Riemann recomputation of the running-cost integral from the stored
/// states and controls (insertion blending not included).
double recompute_running_cost(const HybridTrajectory& traj,
                              const ScenarioModel& model);

/// Evaluates a closed-loop policy along the deterministic no-observation
/// continuation of x0 and freezes it into an open-loop schedule.
ControlSchedule materialize_policy(const ScenarioModel& model,
                                   const Policy& policy, const Vec& x0,
                                   double t0, double horizon, double dt_ctrl);

/// The nominal as a schedule: pass-through for schedules, materialization
/// for policies.
ControlSchedule nominal_as_schedule(const ScenarioModel& model,
                                    const Nominal& nominal, const Vec& x0,
                                    double t0, double horizon, double dt_ctrl);

}  // namespace sacbp

#endif  // SACBP_HYBRID_HPP
