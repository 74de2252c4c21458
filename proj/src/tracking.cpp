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

#include "sacbp/scenarios/tracking.hpp"

#include <Eigen/Cholesky>

#include "sacbp/gaussian.hpp"

namespace sacbp::scenarios {

namespace {
constexpr int kBlock = 6;  // per-target belief block: mean(2) + vec(cov)(4)

inline int block_offset(int i) { return 2 + kBlock * i; }
}  // namespace

TrackingScenario::TrackingScenario(TrackingConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.n_targets < 1) throw ConfigError("tracking: n_targets must be >= 1");
  if (cfg_.dt_obs <= 0.0) throw ConfigError("tracking: dt_obs must be positive");
  Eigen::LLT<Mat> llt(cfg_.process_noise);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("tracking: process noise must be positive definite");
  }
  chol_q_ = llt.matrixL();
}

GaussianBelief TrackingScenario::target_belief(const Vec& x, int i) const {
  const int off = block_offset(i);
  GaussianBelief b;
  b.mean = x.segment(off, 2);
  b.cov = Eigen::Map<const Mat>(x.data() + off + 2, 2, 2);
  return b;
}

Vec TrackingScenario::drift(const Vec& x) const {
  return Vec::Zero(x.size());
}

Mat TrackingScenario::control_coefficient(const Vec& x) const {
  Mat h = Mat::Zero(x.size(), 2);
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

Mat TrackingScenario::flow_jacobian(const Vec& x, const Vec&) const {
  return Mat::Zero(x.size(), x.size());
}

Vec TrackingScenario::flow_vjp(const Vec& x, const Vec&, const Vec&) const {
  return Vec::Zero(x.size());
}

Vec TrackingScenario::flow_jvp(const Vec& x, const Vec&, const Vec&) const {
  return Vec::Zero(x.size());
}

Vec TrackingScenario::target_jump(const Eigen::Vector2d& p, const Vec& block,
                                  double y) const {
  GaussianBelief b;
  b.mean = block.head(2);
  b.cov = Eigen::Map<const Mat>(block.data() + 2, 2, 2);
  const GaussianBelief post =
      ukf_range_step(b, p, y, cfg_.dt_obs, cfg_.process_noise, cfg_.noise_floor,
                     cfg_.noise_slope, cfg_.ukf);
  Vec out(kBlock);
  out.head(2) = post.mean;
  out.tail(4) = Eigen::Map<const Vec>(post.cov.data(), 4);
  return out;
}

Vec TrackingScenario::jump(const Vec& x_pre, const Vec& y, const Vec&) const {
  Vec out = x_pre;
  const Eigen::Vector2d p = x_pre.head<2>();
  for (int i = 0; i < cfg_.n_targets; ++i) {
    out.segment(block_offset(i), kBlock) =
        target_jump(p, x_pre.segment(block_offset(i), kBlock), y(i));
  }
  return out;
}

Mat TrackingScenario::target_jump_jacobian(const Eigen::Vector2d& p,
                                           const Vec& block, double y) const {
  Mat jac(kBlock, 2 + kBlock);
  Vec in(2 + kBlock);
  in.head(2) = p;
  in.tail(kBlock) = block;
  Vec probe = in;
  for (int c = 0; c < 2 + kBlock; ++c) {
    const double h = std::max(1e-6, 1e-6 * std::abs(in(c)));
    probe(c) = in(c) + h;
    const Vec fp = target_jump(probe.head<2>(), probe.tail(kBlock), y);
    probe(c) = in(c) - h;
    const Vec fm = target_jump(probe.head<2>(), probe.tail(kBlock), y);
    probe(c) = in(c);
    jac.col(c) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

Mat TrackingScenario::jump_jacobian(const Vec& x_pre, const Vec& y,
                                    const Vec&) const {
  const int n = state_dim();
  Mat jac = Mat::Zero(n, n);
  jac(0, 0) = 1.0;
  jac(1, 1) = 1.0;
  const Eigen::Vector2d p = x_pre.head<2>();
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const int off = block_offset(i);
    const Mat ji =
        target_jump_jacobian(p, x_pre.segment(off, kBlock), y(i));
    jac.block(off, 0, kBlock, 2) = ji.leftCols(2);
    jac.block(off, off, kBlock, kBlock) = ji.rightCols(kBlock);
  }
  return jac;
}

Vec TrackingScenario::jump_vjp(const Vec& x_pre, const Vec& y, const Vec&,
                               const Vec& rho) const {
  Vec out = Vec::Zero(x_pre.size());
  out.head(2) = rho.head(2);
  const Eigen::Vector2d p = x_pre.head<2>();
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const int off = block_offset(i);
    const Mat ji = target_jump_jacobian(p, x_pre.segment(off, kBlock), y(i));
    const Vec rho_i = rho.segment(off, kBlock);
    out.head(2) += ji.leftCols(2).transpose() * rho_i;
    out.segment(off, kBlock) = ji.rightCols(kBlock).transpose() * rho_i;
  }
  return out;
}

Vec TrackingScenario::jump_jvp(const Vec& x_pre, const Vec& y, const Vec&,
                               const Vec& psi) const {
  Vec out = Vec::Zero(x_pre.size());
  out.head(2) = psi.head(2);
  const Eigen::Vector2d p = x_pre.head<2>();
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const int off = block_offset(i);
    const Mat ji = target_jump_jacobian(p, x_pre.segment(off, kBlock), y(i));
    out.segment(off, kBlock) =
        ji.leftCols(2) * psi.head(2) + ji.rightCols(kBlock) * psi.segment(off, kBlock);
  }
  return out;
}

Vec TrackingScenario::sample_observation(const Vec& x_pre, const Vec&,
                                         RngEngine& rng) const {
  const Eigen::Vector2d p = x_pre.head<2>();
  Vec y(cfg_.n_targets);
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const GaussianBelief b = target_belief(x_pre, i);
    if (cfg_.deterministic) {
      y(i) = (b.mean - p).norm();
      continue;
    }
    // Latent target from the predictive belief (posterior + Brownian growth
    // over the elapsed interval), then range noise at that latent position.
    GaussianBelief pred = b;
    pred.cov += cfg_.process_noise * cfg_.dt_obs;
    const Vec q = pred.sample(rng);
    const Mat r_true =
        cfg_.noise_floor + (q.head<2>() - p).norm() * cfg_.noise_slope;
    const Eigen::Vector2d v =
        Eigen::LLT<Mat>(r_true).matrixL() * rng.normal_vector(2);
    y(i) = (q.head<2>() - p + v).norm();
  }
  return y;
}

Vec TrackingScenario::expected_observation(const Vec& x_pre, const Vec&) const {
  const Eigen::Vector2d p = x_pre.head<2>();
  Vec y(cfg_.n_targets);
  for (int i = 0; i < cfg_.n_targets; ++i) {
    y(i) = (x_pre.segment(block_offset(i), 2) - p.eval()).norm();
  }
  return y;
}

double TrackingScenario::running_cost(const Vec&, const Vec& u) const {
  return cfg_.control_cost_weight * u.dot(u);
}

Vec TrackingScenario::running_cost_gradient(const Vec& x, const Vec&) const {
  return Vec::Zero(x.size());
}

double TrackingScenario::terminal_cost(const Vec& x) const {
  double h = 0.0;
  for (int i = 0; i < cfg_.n_targets; ++i) {
    h += gaussian_entropy_exp(target_belief(x, i).cov).first;
  }
  return h;
}

Vec TrackingScenario::terminal_cost_gradient(const Vec& x) const {
  Vec g = Vec::Zero(x.size());
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const auto [value, grad] = gaussian_entropy_exp(target_belief(x, i).cov);
    (void)value;
    g.segment(block_offset(i) + 2, 4) = Eigen::Map<const Vec>(grad.data(), 4);
  }
  return g;
}

Vec TrackingScenario::world_init(RngEngine& rng) const {
  Vec w(2 + 2 * cfg_.n_targets);
  w.head(2) = cfg_.robot_start;
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const Eigen::Vector2d center = (i % 2 == 0) ? cfg_.cluster_a : cfg_.cluster_b;
    Eigen::Vector2d q = center;
    if (!cfg_.deterministic) {
      q += cfg_.cluster_spread * Eigen::Vector2d(rng.normal(), rng.normal());
    }
    w.segment(2 + 2 * i, 2) = q;
  }
  return w;
}

Vec TrackingScenario::initial_belief_state(const Vec& world,
                                           RngEngine& rng) const {
  Vec x(state_dim());
  x.head(2) = world.head(2);
  const double sd = std::sqrt(cfg_.initial_cov);
  for (int i = 0; i < cfg_.n_targets; ++i) {
    Eigen::Vector2d mean = world.segment(2 + 2 * i, 2);
    if (!cfg_.deterministic) {
      mean += sd * Eigen::Vector2d(rng.normal(), rng.normal());
    }
    const int off = block_offset(i);
    x.segment(off, 2) = mean;
    const Mat cov = cfg_.initial_cov * Mat::Identity(2, 2);
    x.segment(off + 2, 4) = Eigen::Map<const Vec>(cov.data(), 4);
  }
  return x;
}

Vec TrackingScenario::world_step(const Vec& world, const Vec& u, double dt,
                                 RngEngine& rng) const {
  Vec next = world;
  next.head(2) += dt * u;
  if (!cfg_.deterministic) {
    const double sq = std::sqrt(dt);
    for (int i = 0; i < cfg_.n_targets; ++i) {
      next.segment(2 + 2 * i, 2) += sq * (chol_q_ * rng.normal_vector(2));
    }
  }
  return next;
}

Vec TrackingScenario::world_observe(const Vec& world, const Vec&,
                                    RngEngine& rng) const {
  const Eigen::Vector2d p = world.head<2>();
  Vec y(cfg_.n_targets);
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const Eigen::Vector2d q = world.segment(2 + 2 * i, 2);
    if (cfg_.deterministic) {
      y(i) = (q - p).norm();
      continue;
    }
    const Mat r_true = cfg_.noise_floor + (q - p).norm() * cfg_.noise_slope;
    const Eigen::Vector2d v =
        Eigen::LLT<Mat>(r_true).matrixL() * rng.normal_vector(2);
    y(i) = (q - p + v).norm();
  }
  return y;
}

std::vector<std::pair<std::string, double>> TrackingScenario::metrics(
    const Vec& belief_state, const Vec& world) const {
  double worst = 0.0;
  double total = 0.0;
  double err = 0.0;
  for (int i = 0; i < cfg_.n_targets; ++i) {
    const GaussianBelief b = target_belief(belief_state, i);
    const double e = gaussian_entropy_exp(b.cov).first;
    worst = std::max(worst, e);
    total += e;
    err += (b.mean - world.segment(2 + 2 * i, 2)).squaredNorm();
  }
  return {{"worst_exp_entropy", worst},
          {"total_exp_entropy", total},
          {"tracking_rmse", std::sqrt(err / cfg_.n_targets)}};
}

std::shared_ptr<TrackingScenario> make_tracking_scenario(
    const TrackingConfig& cfg) {
  return std::make_shared<TrackingScenario>(cfg);
}

}  // namespace sacbp::scenarios
