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

#include "sacbp/adjoint.hpp"

namespace sacbp {

const Vec& AdjointTrajectory::costate_before(int j,
                                             const HybridTrajectory& traj) const {
  const int ord = traj.jump_ordinal(j);
  if (ord >= 0) return left_limits.at(static_cast<size_t>(ord));
  return rho.at(static_cast<size_t>(j));
}

namespace {

AdjointTrajectory backward_core(const ScenarioModel& model,
                                const HybridTrajectory& traj) {
  AdjointTrajectory adj;
  adj.grid = traj.grid;
  const int M = traj.grid.n_cells;
  const double dt = traj.grid.dt_ctrl;
  adj.rho.assign(static_cast<size_t>(M) + 1, Vec());
  adj.left_limits.assign(traj.jump_indices.size(), Vec());

  Vec right = model.terminal_cost_gradient(traj.final_state());
  adj.rho[static_cast<size_t>(M)] = right;
  {
    const int ord = traj.jump_ordinal(M);
    if (ord >= 0) {
      right = model.jump_vjp(traj.pre_jump_states[static_cast<size_t>(ord)],
                             traj.observations[static_cast<size_t>(ord)],
                             traj.epoch_controls[static_cast<size_t>(ord)], right);
      adj.left_limits[static_cast<size_t>(ord)] = right;
    }
  }
  for (int j = M - 1; j >= 0; --j) {
    const Vec& xj = traj.states[static_cast<size_t>(j)];
    const Vec& uj = traj.controls[static_cast<size_t>(j)];
    Vec rho_j = right + dt * (model.running_cost_gradient(xj, uj) +
                              model.flow_vjp(xj, uj, right));
    if (!rho_j.allFinite()) {
      throw DivergenceError("adjoint_backward: non-finite costate");
    }
    adj.rho[static_cast<size_t>(j)] = rho_j;
    const int ord = traj.jump_ordinal(j);
    if (ord >= 0 && j > 0) {
      right = model.jump_vjp(traj.pre_jump_states[static_cast<size_t>(ord)],
                             traj.observations[static_cast<size_t>(ord)],
                             traj.epoch_controls[static_cast<size_t>(ord)], rho_j);
      adj.left_limits[static_cast<size_t>(ord)] = right;
    } else {
      right = std::move(rho_j);
    }
  }
  return adj;
}

}  // namespace

AdjointTrajectory adjoint_backward_mixed(const ScenarioModel& model,
                                         const HybridTrajectory& traj) {
  if (model.adjoint_kind() != AdjointKind::kMixed) {
    throw Error("adjoint_backward_mixed: scenario is not mixed-observability");
  }
  return backward_core(model, traj);
}

AdjointTrajectory adjoint_backward_general(const ScenarioModel& model,
                                           const HybridTrajectory& traj) {
  if (model.adjoint_kind() != AdjointKind::kGeneral) {
    throw Error("adjoint_backward_general: scenario is not general belief-space");
  }
  return backward_core(model, traj);
}

AdjointTrajectory adjoint_backward(const ScenarioModel& model,
                                   const HybridTrajectory& traj) {
  return backward_core(model, traj);
}

VariationTrajectory variational_forward(const ScenarioModel& model,
                                        const HybridTrajectory& traj,
                                        double tau, const Vec& v) {
  const TimeGrid& grid = traj.grid;
  const int M = grid.n_cells;
  const int j_tau = grid.index_of(tau);
  if (j_tau < 1 || j_tau > M) {
    throw Error("variational_forward: tau outside the trajectory grid");
  }
  const double dt = grid.dt_ctrl;

  VariationTrajectory var;
  var.grid = grid;
  var.start_index = j_tau;

  // Insertion initial condition at the left state of the cell ending at tau.
  const Vec& x_tau = traj.states[static_cast<size_t>(j_tau - 1)];
  const Vec& u_tau = traj.controls[static_cast<size_t>(j_tau - 1)];
  Vec psi = model.flow(x_tau, v) - model.flow(x_tau, u_tau);
  double psi_hat = model.running_cost(x_tau, v) - model.running_cost(x_tau, u_tau);

  {
    const int ord = traj.jump_ordinal(j_tau);
    if (ord >= 0) {
      var.jump_indices.push_back(j_tau);
      var.pre_jump_psi.push_back(psi);
      psi = model.jump_jvp(traj.pre_jump_states[static_cast<size_t>(ord)],
                           traj.observations[static_cast<size_t>(ord)],
                           traj.epoch_controls[static_cast<size_t>(ord)], psi);
    }
  }
  var.psi.push_back(psi);
  var.psi_hat.push_back(psi_hat);

  for (int j = j_tau; j < M; ++j) {
    const Vec& xj = traj.states[static_cast<size_t>(j)];
    const Vec& uj = traj.controls[static_cast<size_t>(j)];
    psi_hat += dt * model.running_cost_gradient(xj, uj).dot(psi);
    psi += dt * model.flow_jvp(xj, uj, psi);
    if (!psi.allFinite()) {
      throw DivergenceError("variational_forward: non-finite variation");
    }
    const int jn = j + 1;
    const int ord = traj.jump_ordinal(jn);
    if (ord >= 0) {
      var.jump_indices.push_back(jn);
      var.pre_jump_psi.push_back(psi);
      psi = model.jump_jvp(traj.pre_jump_states[static_cast<size_t>(ord)],
                           traj.observations[static_cast<size_t>(ord)],
                           traj.epoch_controls[static_cast<size_t>(ord)], psi);
    }
    var.psi.push_back(psi);
    var.psi_hat.push_back(psi_hat);
  }
  return var;
}

double nu_from_adjoint(const ScenarioModel& model, const HybridTrajectory& traj,
                       const AdjointTrajectory& adj, double tau, const Vec& v) {
  const int j_tau = traj.grid.index_of(tau);
  if (j_tau < 1 || j_tau > traj.grid.n_cells) {
    throw Error("nu_from_adjoint: tau outside the trajectory grid");
  }
  const Vec& x_tau = traj.states[static_cast<size_t>(j_tau - 1)];
  const Vec& u_tau = traj.controls[static_cast<size_t>(j_tau - 1)];
  const Vec& rho_tau = adj.costate_before(j_tau, traj);
  const double c_diff =
      model.running_cost(x_tau, v) - model.running_cost(x_tau, u_tau);
  return c_diff + rho_tau.dot(model.flow(x_tau, v) - model.flow(x_tau, u_tau));
}

double nu_from_variation(const ScenarioModel& model,
                         const HybridTrajectory& traj,
                         const VariationTrajectory& var) {
  const int M = traj.grid.n_cells;
  const Vec grad_h = model.terminal_cost_gradient(traj.final_state());
  return var.hat_at(M) + grad_h.dot(var.at(M));
}

double duality_product(const HybridTrajectory& traj,
                       const AdjointTrajectory& adj,
                       const VariationTrajectory& var, int grid_index,
                       bool pre_jump_side) {
  if (!pre_jump_side) {
    return var.hat_at(grid_index) +
           adj.rho.at(static_cast<size_t>(grid_index)).dot(var.at(grid_index));
  }
  const int ord = traj.jump_ordinal(grid_index);
  if (ord < 0) throw Error("duality_product: not a jump index");
  // Locate the matching pre-jump variation.
  int vord = -1;
  for (size_t k = 0; k < var.jump_indices.size(); ++k) {
    if (var.jump_indices[k] == grid_index) {
      vord = static_cast<int>(k);
      break;
    }
  }
  if (vord < 0) throw Error("duality_product: jump precedes the perturbation");
  return var.hat_at(grid_index) +
         adj.left_limits.at(static_cast<size_t>(ord))
             .dot(var.pre_jump_psi.at(static_cast<size_t>(vord)));
}

}  // namespace sacbp
