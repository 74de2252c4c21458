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

#include "sacbp/scenarios/linear_fixture.hpp"

namespace sacbp::scenarios {

LinearSystemModel::LinearSystemModel(Mat a, Mat b, Mat c, Mat q, Mat r)
    : a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      q_(std::move(q)),
      r_(std::move(r)) {
  if (a_.rows() != a_.cols() || b_.rows() != a_.rows() || c_.cols() != a_.rows()) {
    throw ConfigError("LinearSystemModel: dimension mismatch");
  }
}

std::shared_ptr<GaussianBeliefScenario> make_linear_fixture(
    int dim, std::uint64_t seed, bool deterministic_observations) {
  RngEngine rng(derive_seed(seed, 0x11f, 0));
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = 0.3 * rng.normal() / std::sqrt(dim);
  }
  a -= 0.8 * Mat::Identity(dim, dim);  // comfortably stable
  Mat b(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) b(i, j) = (i == j) ? 1.0 : 0.2 * rng.normal();
  }
  const Mat c = Mat::Identity(dim, dim);
  const Mat q = 0.02 * Mat::Identity(dim, dim);
  const Mat r = 0.1 * Mat::Identity(dim, dim);
  auto sys = std::make_shared<LinearSystemModel>(a, b, c, q, r);
  const Mat cx = Mat::Identity(dim, dim);
  const Vec cu = Vec::Constant(dim, 0.5);
  const Vec lo = Vec::Constant(dim, -3.0);
  const Vec hi = Vec::Constant(dim, 3.0);
  return std::make_shared<GaussianBeliefScenario>(
      "linear_fixture", sys, cx, cu, lo, hi, deterministic_observations);
}

// ---------------------------------------------------------------------------
// Linear1dMixedScenario
// ---------------------------------------------------------------------------

Vec Linear1dMixedScenario::drift(const Vec& x) const {
  Vec d = Vec::Zero(3);
  d(0) = cfg_.a_p * x(0);
  return d;
}

Mat Linear1dMixedScenario::control_coefficient(const Vec&) const {
  Mat h = Mat::Zero(3, 1);
  h(0, 0) = 1.0;
  return h;
}

Mat Linear1dMixedScenario::flow_jacobian(const Vec&, const Vec&) const {
  Mat j = Mat::Zero(3, 3);
  j(0, 0) = cfg_.a_p;
  return j;
}

Vec Linear1dMixedScenario::jump(const Vec& x_pre, const Vec& y,
                                const Vec&) const {
  const double p = x_pre(0);
  const double mu = x_pre(1);
  const double s = x_pre(2);
  if (s <= 0.0) throw FilterError("linear1d_mixed: nonpositive variance");
  const double s_pred = s + cfg_.q_proc * cfg_.dt_obs;
  const double r = cfg_.r0 + cfg_.r1 * (mu - p) * (mu - p);
  const double denom = s_pred + r;
  Vec out(3);
  out(0) = p;
  out(1) = mu + s_pred * (y(0) - mu) / denom;
  out(2) = s_pred * r / denom;
  return out;
}

Mat Linear1dMixedScenario::jump_jacobian(const Vec& x_pre, const Vec& y,
                                         const Vec&) const {
  const double p = x_pre(0);
  const double mu = x_pre(1);
  const double s = x_pre(2);
  const double s_pred = s + cfg_.q_proc * cfg_.dt_obs;
  const double r = cfg_.r0 + cfg_.r1 * (mu - p) * (mu - p);
  const double denom = s_pred + r;
  const double k = s_pred / denom;
  const double inno = y(0) - mu;
  const double r_mu = 2.0 * cfg_.r1 * (mu - p);
  const double r_p = -r_mu;
  // dK/dr = -s_pred / denom^2; dK/ds_pred = r / denom^2.
  const double k_r = -s_pred / (denom * denom);
  const double k_s = r / (denom * denom);
  Mat j = Mat::Zero(3, 3);
  j(0, 0) = 1.0;
  j(1, 0) = inno * k_r * r_p;
  j(1, 1) = 1.0 - k + inno * k_r * r_mu;
  j(1, 2) = inno * k_s;
  // s' = s_pred r / denom: d/dr = s_pred^2/denom^2, d/ds_pred = r^2/denom^2.
  j(2, 0) = (s_pred * s_pred / (denom * denom)) * r_p;
  j(2, 1) = (s_pred * s_pred / (denom * denom)) * r_mu;
  j(2, 2) = r * r / (denom * denom);
  return j;
}

Vec Linear1dMixedScenario::sample_observation(const Vec& x_pre, const Vec&,
                                              RngEngine& rng) const {
  Vec y(1);
  if (cfg_.deterministic) {
    y(0) = x_pre(1);
    return y;
  }
  const double p = x_pre(0);
  const double s_pred = x_pre(2) + cfg_.q_proc * cfg_.dt_obs;
  const double latent = x_pre(1) + std::sqrt(std::max(s_pred, 0.0)) * rng.normal();
  const double r_true = cfg_.r0 + cfg_.r1 * (latent - p) * (latent - p);
  y(0) = latent + std::sqrt(r_true) * rng.normal();
  return y;
}

Vec Linear1dMixedScenario::expected_observation(const Vec& x_pre,
                                                const Vec&) const {
  return x_pre.segment(1, 1);
}

double Linear1dMixedScenario::running_cost(const Vec& x, const Vec& u) const {
  return 0.5 * cfg_.control_cost * u(0) * u(0) + cfg_.w_mu * x(1) * x(1) +
         cfg_.w_s * x(2);
}

Vec Linear1dMixedScenario::running_cost_gradient(const Vec& x,
                                                 const Vec&) const {
  Vec g = Vec::Zero(3);
  g(1) = 2.0 * cfg_.w_mu * x(1);
  g(2) = cfg_.w_s;
  return g;
}

double Linear1dMixedScenario::terminal_cost(const Vec& x) const {
  const double e = x(0) - x(1);
  return cfg_.h_p * e * e + cfg_.h_s * x(2);
}

Vec Linear1dMixedScenario::terminal_cost_gradient(const Vec& x) const {
  const double e = x(0) - x(1);
  Vec g(3);
  g(0) = 2.0 * cfg_.h_p * e;
  g(1) = -2.0 * cfg_.h_p * e;
  g(2) = cfg_.h_s;
  return g;
}

Vec Linear1dMixedScenario::world_init(RngEngine& rng) const {
  Vec w(2);
  w(0) = cfg_.p0;
  w(1) = cfg_.deterministic
             ? cfg_.mu0
             : cfg_.mu0 + std::sqrt(cfg_.s0) * rng.normal();
  return w;
}

Vec Linear1dMixedScenario::initial_belief_state(const Vec& world,
                                                RngEngine&) const {
  Vec x(3);
  x(0) = world(0);
  x(1) = cfg_.mu0;
  x(2) = cfg_.s0;
  return x;
}

Vec Linear1dMixedScenario::world_step(const Vec& world, const Vec& u, double dt,
                                      RngEngine& rng) const {
  Vec next(2);
  next(0) = world(0) + dt * (cfg_.a_p * world(0) + u(0));
  next(1) = world(1);
  if (!cfg_.deterministic) {
    next(1) += std::sqrt(cfg_.q_proc * dt) * rng.normal();
  }
  return next;
}

Vec Linear1dMixedScenario::world_observe(const Vec& world, const Vec&,
                                         RngEngine& rng) const {
  Vec y(1);
  if (cfg_.deterministic) {
    y(0) = world(1);
    return y;
  }
  const double r_true =
      cfg_.r0 + cfg_.r1 * (world(1) - world(0)) * (world(1) - world(0));
  y(0) = world(1) + std::sqrt(r_true) * rng.normal();
  return y;
}

std::vector<std::pair<std::string, double>> Linear1dMixedScenario::metrics(
    const Vec& belief_state, const Vec& world) const {
  return {{"target_error", std::abs(belief_state(1) - world(1))},
          {"belief_variance", belief_state(2)}};
}

}  // namespace sacbp::scenarios
