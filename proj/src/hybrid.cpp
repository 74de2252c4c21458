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

#include "sacbp/hybrid.hpp"

#include <algorithm>
#include <cmath>

namespace sacbp {

TimeGrid::TimeGrid(double t0_, double dt_ctrl_, double dt_obs_, double horizon_)
    : t0(t0_), dt_ctrl(dt_ctrl_), dt_obs(dt_obs_), horizon(horizon_) {
  if (dt_ctrl <= 0.0) throw ConfigError("TimeGrid: dt_ctrl must be positive");
  if (horizon < 0.0) throw ConfigError("TimeGrid: negative horizon");
  if (dt_obs > 0.0) {
    if (!on_grid(dt_obs, dt_ctrl)) {
      throw ConfigError("TimeGrid: dt_obs must be a multiple of dt_ctrl");
    }
    if (!on_grid(horizon, dt_obs)) {
      throw ConfigError("TimeGrid: horizon must be a multiple of dt_obs");
    }
    cells_per_obs = static_cast<int>(std::llround(dt_obs / dt_ctrl));
  } else if (!on_grid(horizon, dt_ctrl)) {
    throw ConfigError("TimeGrid: horizon must be a multiple of dt_ctrl");
  }
  n_cells = static_cast<int>(std::llround(horizon / dt_ctrl));
}

int HybridTrajectory::jump_ordinal(int j) const {
  const auto it = std::lower_bound(jump_indices.begin(), jump_indices.end(), j);
  if (it == jump_indices.end() || *it != j) return -1;
  return static_cast<int>(it - jump_indices.begin());
}

std::vector<Vec> euler_flow(const ScenarioModel& model, const Vec& x0,
                            const ControlSchedule& schedule, double t0,
                            double t1) {
  if (t1 < t0) throw Error("euler_flow: t1 must be >= t0");
  const double dt = schedule.dt();
  if (!on_grid(t0 - schedule.t0(), dt) || !on_grid(t1 - t0, dt)) {
    throw Error("euler_flow: endpoints not on the control grid");
  }
  const int n_steps = static_cast<int>(std::llround((t1 - t0) / dt));
  std::vector<Vec> path;
  path.reserve(static_cast<size_t>(n_steps) + 1);
  path.push_back(x0);
  Vec x = x0;
  for (int j = 0; j < n_steps; ++j) {
    const Vec& u = schedule.cell(schedule.cell_starting_at(t0 + j * dt));
    x += dt * model.flow(x, u);
    if (!x.allFinite()) {
      throw DivergenceError("euler_flow: non-finite state at t=" +
                            std::to_string(t0 + (j + 1) * dt));
    }
    path.push_back(x);
  }
  return path;
}

namespace {

// Fraction of the cell (t_j, t_j + dt] covered by (tau - eps, tau].
double insertion_weight(const Insertion& ins, double t_left, double dt) {
  const double lo = std::max(t_left, ins.tau - ins.eps);
  const double hi = std::min(t_left + dt, ins.tau);
  return std::max(0.0, (hi - lo) / dt);
}

}  // namespace

HybridTrajectory simulate_nominal(const ScenarioModel& model, const Vec& x0,
                                  const Nominal& nominal, double t0,
                                  double horizon, double dt_ctrl, double dt_obs,
                                  std::uint64_t rng_seed,
                                  const std::optional<Insertion>& insertion) {
  HybridTrajectory traj;
  traj.grid = TimeGrid(t0, dt_ctrl, dt_obs, horizon);
  const int M = traj.grid.n_cells;
  traj.states.reserve(static_cast<size_t>(M) + 1);
  traj.controls.reserve(static_cast<size_t>(M));
  traj.running_cost_accum.reserve(static_cast<size_t>(M) + 1);
  traj.states.push_back(x0);
  traj.running_cost_accum.push_back(0.0);

  RngEngine rng(rng_seed);
  Vec x = x0;
  double accum = 0.0;
  for (int j = 0; j < M; ++j) {
    const double t = traj.grid.time_at(j);
    Vec u;
    if (const auto* sched = std::get_if<ControlSchedule>(&nominal)) {
      u = sched->cell(sched->cell_starting_at(t));
    } else {
      const auto& policy = std::get<std::shared_ptr<const Policy>>(nominal);
      u = model.clamp_control(policy->control(x, t));
    }
    traj.controls.push_back(u);

    double w = 0.0;
    if (insertion && insertion->eps > 0.0) {
      w = insertion_weight(*insertion, t, dt_ctrl);
    }
    if (w > 0.0) {
      accum += dt_ctrl * ((1.0 - w) * model.running_cost(x, u) +
                          w * model.running_cost(x, insertion->v));
      x += dt_ctrl * ((1.0 - w) * model.flow(x, u).eval() +
                      w * model.flow(x, insertion->v).eval());
    } else {
      accum += dt_ctrl * model.running_cost(x, u);
      x += dt_ctrl * model.flow(x, u);
    }
    if (!x.allFinite()) {
      throw DivergenceError("simulate_nominal: non-finite state at t=" +
                            std::to_string(traj.grid.time_at(j + 1)));
    }

    const int jn = j + 1;
    if (traj.grid.is_epoch_index(jn)) {
      const Vec& u_epoch = traj.controls.back();
      traj.jump_indices.push_back(jn);
      traj.pre_jump_states.push_back(x);
      traj.epoch_controls.push_back(u_epoch);
      const Vec y = model.sample_observation(x, u_epoch, rng);
      traj.observations.push_back(y);
      x = model.jump(x, y, u_epoch);
      if (!x.allFinite()) {
        throw DivergenceError("simulate_nominal: non-finite state after jump");
      }
    }
    traj.states.push_back(x);
    traj.running_cost_accum.push_back(accum);
  }
  return traj;
}

double total_cost(const HybridTrajectory& traj, const ScenarioModel& model) {
  const double h = model.terminal_cost(traj.final_state());
  const double J = traj.running_cost_accum.back() + h;
  if (!std::isfinite(J)) throw DivergenceError("total_cost: non-finite cost");
  return J;
}

double recompute_running_cost(const HybridTrajectory& traj,
                              const ScenarioModel& model) {
  double s = 0.0;
  for (size_t j = 0; j < traj.controls.size(); ++j) {
    s += traj.grid.dt_ctrl * model.running_cost(traj.states[j], traj.controls[j]);
  }
  return s;
}

ControlSchedule materialize_policy(const ScenarioModel& model,
                                   const Policy& policy, const Vec& x0,
                                   double t0, double horizon, double dt_ctrl) {
  const TimeGrid grid(t0, dt_ctrl, 0.0, horizon);
  std::vector<Vec> values;
  values.reserve(static_cast<size_t>(grid.n_cells));
  Vec x = x0;
  for (int j = 0; j < grid.n_cells; ++j) {
    const Vec u = model.clamp_control(policy.control(x, grid.time_at(j)));
    values.push_back(u);
    x += dt_ctrl * model.flow(x, u);
    if (!x.allFinite()) {
      throw DivergenceError("materialize_policy: non-finite state");
    }
  }
  return ControlSchedule(t0, dt_ctrl, std::move(values), model.control_lower(),
                         model.control_upper());
}

ControlSchedule nominal_as_schedule(const ScenarioModel& model,
                                    const Nominal& nominal, const Vec& x0,
                                    double t0, double horizon, double dt_ctrl) {
  if (const auto* sched = std::get_if<ControlSchedule>(&nominal)) {
    return *sched;
  }
  const auto& policy = std::get<std::shared_ptr<const Policy>>(nominal);
  return materialize_policy(model, *policy, x0, t0, horizon, dt_ctrl);
}

}  // namespace sacbp
