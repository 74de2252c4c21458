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

#include "sacbp/scenario.hpp"

#include "sacbp/numdiff.hpp"

namespace sacbp {

Vec ScenarioModel::flow(const Vec& x, const Vec& u) const {
  return drift(x) + control_coefficient(x) * u;
}

Mat ScenarioModel::flow_jacobian(const Vec& x, const Vec& u) const {
  return numeric_jacobian([&](const Vec& xp) { return flow(xp, u); }, x);
}

Vec ScenarioModel::flow_vjp(const Vec& x, const Vec& u, const Vec& rho) const {
  return flow_jacobian(x, u).transpose() * rho;
}

Vec ScenarioModel::flow_jvp(const Vec& x, const Vec& u, const Vec& psi) const {
  return flow_jacobian(x, u) * psi;
}

Mat ScenarioModel::jump_jacobian(const Vec& x_pre, const Vec& y,
                                 const Vec& u_epoch) const {
  return numeric_jacobian(
      [&](const Vec& xp) { return jump(xp, y, u_epoch); }, x_pre);
}

Vec ScenarioModel::jump_vjp(const Vec& x_pre, const Vec& y, const Vec& u_epoch,
                            const Vec& rho) const {
  return jump_jacobian(x_pre, y, u_epoch).transpose() * rho;
}

Vec ScenarioModel::jump_jvp(const Vec& x_pre, const Vec& y, const Vec& u_epoch,
                            const Vec& psi) const {
  return jump_jacobian(x_pre, y, u_epoch) * psi;
}

Vec ScenarioModel::running_cost_gradient(const Vec& x, const Vec& u) const {
  return numeric_gradient(
      [&](const Vec& xp) { return running_cost(xp, u); }, x);
}

Vec ScenarioModel::terminal_cost_gradient(const Vec& x) const {
  return numeric_gradient([&](const Vec& xp) { return terminal_cost(xp); }, x);
}

Vec ScenarioModel::clamp_control(const Vec& u) const {
  return u.cwiseMax(control_lower()).cwiseMin(control_upper());
}

double control_affinity_residual(const ScenarioModel& model, const Vec& x_ref,
                                 double spread, int n_probes,
                                 std::uint64_t seed) {
  RngEngine rng(seed);
  const Vec lo = model.control_lower();
  const Vec hi = model.control_upper();
  double worst = 0.0;
  for (int k = 0; k < n_probes; ++k) {
    const Vec x = x_ref + spread * rng.normal_vector(model.state_dim());
    Vec u(model.control_dim());
    for (int j = 0; j < u.size(); ++j) u(j) = rng.uniform(lo(j), hi(j));
    const Vec fu = model.flow(x, u);
    const Vec res = fu - model.flow(x, Vec::Zero(u.size())) -
                    model.control_coefficient(x) * u;
    worst = std::max(worst, res.norm() / (1.0 + fu.norm()));
  }
  return worst;
}

double control_cost_residual(const ScenarioModel& model, const Vec& x_ref,
                             double spread, int n_probes, std::uint64_t seed) {
  RngEngine rng(seed);
  const Vec lo = model.control_lower();
  const Vec hi = model.control_upper();
  const Vec cu = model.control_cost_diagonal();
  double worst = 0.0;
  for (int k = 0; k < n_probes; ++k) {
    const Vec x = x_ref + spread * rng.normal_vector(model.state_dim());
    Vec u(model.control_dim());
    for (int j = 0; j < u.size(); ++j) u(j) = rng.uniform(lo(j), hi(j));
    const double quad = 0.5 * u.cwiseProduct(cu).dot(u);
    const double res = model.running_cost(x, u) -
                       model.running_cost(x, Vec::Zero(u.size())) - quad;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace sacbp
