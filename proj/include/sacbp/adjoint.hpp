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

#ifndef SACBP_ADJOINT_HPP
#define SACBP_ADJOINT_HPP

#include <vector>

#include "sacbp/hybrid.hpp"
#include "sacbp/scenario.hpp"
#include "sacbp/types.hpp"

namespace sacbp {

/// Costate path, integrated backward from the terminal-cost gradient on the
/// same grid as the forward pass. rho[j] is the value at grid index j
/// (post-jump side at epochs); left_limits[k] holds rho(t_k^-) for jump k.
///
/// Discretization: the backward Euler sweep over a cell evaluates the
/// Jacobians at the cell's left state and applies them to the costate at the
/// cell's right edge. This is the exact discrete adjoint of the forward
/// Euler variational flow, so rho^T psi (plus the running-cost variation) is
/// conserved to machine precision, including across jumps.
struct AdjointTrajectory {
  TimeGrid grid;
  std::vector<Vec> rho;          // n_cells + 1
  std::vector<Vec> left_limits;  // one per jump

  /// Costate acting on the pre-jump state at grid index j: the left limit
  /// at epochs, rho[j] elsewhere.
  const Vec& costate_before(int j, const HybridTrajectory& traj) const;
};

/// Perturbation propagated forward from tau: psi[i] is the state variation
/// at grid index start_index + i, psi_hat[i] the accumulated running-cost
/// variation. pre_jump_psi[k] stores the left limit at each jump >= tau.
struct VariationTrajectory {
  TimeGrid grid;
  int start_index = 0;
  std::vector<Vec> psi;
  std::vector<double> psi_hat;
  std::vector<int> jump_indices;     // epochs >= start_index
  std::vector<Vec> pre_jump_psi;

  const Vec& at(int grid_index) const {
    return psi.at(static_cast<size_t>(grid_index - start_index));
  }
  double hat_at(int grid_index) const {
    return psi_hat.at(static_cast<size_t>(grid_index - start_index));
  }
};

/// Backward adjoint pass for mixed-observability systems: between jumps
///   rho_p' = -dc/dp - (df/dp)^T rho_p,   rho_b' = -dc/db,
/// across jumps
///   rho_p(t_k^-) = rho_p(t_k) + (dg/dp)^T rho_b(t_k),
///   rho_b(t_k^-) = (dg/db)^T rho_b(t_k),
/// realized through the scenario's flow/jump adjoint actions on the
/// augmented state. Boundary: gradient of h at the final post-jump state.
AdjointTrajectory adjoint_backward_mixed(const ScenarioModel& model,
                                         const HybridTrajectory& traj);

/// Backward adjoint pass for general belief systems:
///   rho' = -dc/db - (df/db)^T rho,  rho(t_k^-) = (dg/db)^T rho(t_k).
AdjointTrajectory adjoint_backward_general(const ScenarioModel& model,
                                           const HybridTrajectory& traj);

/// Dispatches on the scenario's declared kind.
AdjointTrajectory adjoint_backward(const ScenarioModel& model,
                                   const HybridTrajectory& traj);

/// Forward variational pass for the insertion of control v ending at tau:
/// initial condition psi(tau) = f(x, v) - f(x, u(tau)) evaluated at the left
/// state of the cell ending at tau (zero belief block arises naturally in
/// the mixed case), linearized flow between jumps and linearized jump maps
/// at epochs, with the running-cost variation accumulated alongside.
VariationTrajectory variational_forward(const ScenarioModel& model,
                                        const HybridTrajectory& traj,
                                        double tau, const Vec& v);

/// First-order total-cost variation from one backward pass:
/// nu = c(x,v) - c(x,u(tau)) + rho(tau)^T {f(x,v) - f(x,u(tau))}.
double nu_from_adjoint(const ScenarioModel& model, const HybridTrajectory& traj,
                       const AdjointTrajectory& adj, double tau, const Vec& v);

/// Same quantity by forward accumulation:
/// nu = psi_hat(t_f) + dh/dx(x_f)^T psi(t_f).
double nu_from_variation(const ScenarioModel& model,
                         const HybridTrajectory& traj,
                         const VariationTrajectory& var);

/// rho_bar^T psi_bar at a grid index (pre- or post-jump side), the quantity
/// conserved along the trajectory: psi_hat + rho^T psi with rho_hat = 1.
double duality_product(const HybridTrajectory& traj,
                       const AdjointTrajectory& adj,
                       const VariationTrajectory& var, int grid_index,
                       bool pre_jump_side);

}  // namespace sacbp

#endif  // SACBP_ADJOINT_HPP
