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

#include "sacbp/scenarios/manipulation.hpp"

namespace sacbp::scenarios {

namespace {

// State indices.
enum : int { kRx, kRy, kTheta, kVx, kVy, kOmega, kLogM, kLogI, kArmX, kArmY, kLogCf };

inline Eigen::Vector2d perp(const Eigen::Vector2d& w) {
  return Eigen::Vector2d(-w.y(), w.x());
}

Mat build_state_cost(const ManipulationConfig& cfg) {
  Vec d = Vec::Zero(11);
  d(kRx) = cfg.pos_weight;
  d(kRy) = cfg.pos_weight;
  d(kTheta) = cfg.angle_weight;
  d(kVx) = cfg.vel_weight;
  d(kVy) = cfg.vel_weight;
  d(kOmega) = cfg.omega_weight;
  return d.asDiagonal();
}

}  // namespace

RigidBodySystemModel::RigidBodySystemModel(const ManipulationConfig& cfg) {
  Vec q = Vec::Zero(11);
  q.head(6).setConstant(cfg.q_state);
  q.tail(5).setConstant(cfg.q_param);
  q_ = q.asDiagonal();
  Vec r(6);
  r.head(2).setConstant(cfg.pos_noise * cfg.pos_noise);
  r.segment(2, 2).setConstant(cfg.vel_noise * cfg.vel_noise);
  r.tail(2).setConstant(cfg.acc_noise * cfg.acc_noise);
  r_ = r.asDiagonal();
}

Vec RigidBodySystemModel::f_sys(const Vec& x, const Vec& u) const {
  const double inv_m = std::exp(-x(kLogM));
  const double inv_i = std::exp(-x(kLogI));
  const double cf = std::exp(x(kLogCf));
  Vec f = Vec::Zero(11);
  f(kRx) = x(kVx);
  f(kRy) = x(kVy);
  f(kTheta) = x(kOmega);
  f(kVx) = inv_m * (u(0) - cf * x(kVx));
  f(kVy) = inv_m * (u(1) - cf * x(kVy));
  f(kOmega) = inv_i * (u(2) + x(kArmX) * u(1) - x(kArmY) * u(0));
  return f;
}

Mat RigidBodySystemModel::jacobian(const Vec& x, const Vec& u) const {
  const double inv_m = std::exp(-x(kLogM));
  const double inv_i = std::exp(-x(kLogI));
  const double cf = std::exp(x(kLogCf));
  const double vdot_x = inv_m * (u(0) - cf * x(kVx));
  const double vdot_y = inv_m * (u(1) - cf * x(kVy));
  const double wdot = inv_i * (u(2) + x(kArmX) * u(1) - x(kArmY) * u(0));
  Mat a = Mat::Zero(11, 11);
  a(kRx, kVx) = 1.0;
  a(kRy, kVy) = 1.0;
  a(kTheta, kOmega) = 1.0;
  a(kVx, kVx) = -inv_m * cf;
  a(kVy, kVy) = -inv_m * cf;
  a(kVx, kLogM) = -vdot_x;
  a(kVy, kLogM) = -vdot_y;
  a(kVx, kLogCf) = -inv_m * cf * x(kVx);
  a(kVy, kLogCf) = -inv_m * cf * x(kVy);
  a(kOmega, kLogI) = -wdot;
  a(kOmega, kArmX) = inv_i * u(1);
  a(kOmega, kArmY) = -inv_i * u(0);
  return a;
}

Vec RigidBodySystemModel::observe(const Vec& x, const Vec& u) const {
  const double c = std::cos(x(kTheta));
  const double s = std::sin(x(kTheta));
  const Eigen::Vector2d arm(x(kArmX), x(kArmY));
  const Eigen::Vector2d d(c * arm.x() - s * arm.y(), s * arm.x() + c * arm.y());
  const Eigen::Vector2d r(x(kRx), x(kRy));
  const Eigen::Vector2d v(x(kVx), x(kVy));
  const double omega = x(kOmega);
  const Vec f = f_sys(x, u);
  const Eigen::Vector2d vdot(f(kVx), f(kVy));
  const double wdot = f(kOmega);
  Vec y(6);
  y.head(2) = r + d;
  y.segment(2, 2) = v + omega * perp(d);
  y.tail(2) = vdot + wdot * perp(d) - omega * omega * d;
  return y;
}

Mat RigidBodySystemModel::obs_jacobian(const Vec& x, const Vec& u) const {
  const double c = std::cos(x(kTheta));
  const double s = std::sin(x(kTheta));
  const Eigen::Vector2d arm(x(kArmX), x(kArmY));
  const Eigen::Vector2d d(c * arm.x() - s * arm.y(), s * arm.x() + c * arm.y());
  const Eigen::Vector2d d_theta = perp(d);
  const Eigen::Vector2d d_ax(c, s);
  const Eigen::Vector2d d_ay(-s, c);
  const double omega = x(kOmega);
  const double inv_m = std::exp(-x(kLogM));
  const double inv_i = std::exp(-x(kLogI));
  const double cf = std::exp(x(kLogCf));
  const Eigen::Vector2d v(x(kVx), x(kVy));
  const Eigen::Vector2d vdot = inv_m * (u.head<2>() - cf * v);
  const double wdot = inv_i * (u(2) + arm.x() * u(1) - arm.y() * u(0));

  Mat cjac = Mat::Zero(6, 11);
  // Attachment position: r + d(theta, arm).
  cjac(0, kRx) = 1.0;
  cjac(1, kRy) = 1.0;
  cjac.block<2, 1>(0, kTheta) = d_theta;
  cjac.block<2, 1>(0, kArmX) = d_ax;
  cjac.block<2, 1>(0, kArmY) = d_ay;
  // Attachment velocity: v + omega perp(d).
  cjac(2, kVx) = 1.0;
  cjac(3, kVy) = 1.0;
  cjac.block<2, 1>(2, kTheta) = omega * perp(d_theta);  // = -omega d
  cjac.block<2, 1>(2, kOmega) = perp(d);
  cjac.block<2, 1>(2, kArmX) = omega * perp(d_ax);
  cjac.block<2, 1>(2, kArmY) = omega * perp(d_ay);
  // Attachment acceleration: vdot + wdot perp(d) - omega^2 d.
  cjac(4, kVx) = -inv_m * cf;
  cjac(5, kVy) = -inv_m * cf;
  cjac.block<2, 1>(4, kLogM) = -vdot;
  cjac.block<2, 1>(4, kLogCf) = -inv_m * cf * v;
  cjac.block<2, 1>(4, kTheta) = wdot * perp(d_theta) - omega * omega * d_theta;
  cjac.block<2, 1>(4, kOmega) = -2.0 * omega * d;
  cjac.block<2, 1>(4, kLogI) = -wdot * perp(d);
  cjac.block<2, 1>(4, kArmX) = inv_i * u(1) * perp(d) + wdot * perp(d_ax) -
                               omega * omega * d_ax;
  cjac.block<2, 1>(4, kArmY) = -inv_i * u(0) * perp(d) + wdot * perp(d_ay) -
                               omega * omega * d_ay;
  return cjac;
}

ManipulationScenario::ManipulationScenario(ManipulationConfig cfg)
    : GaussianBeliefScenario(
          "manipulation", std::make_shared<RigidBodySystemModel>(cfg),
          build_state_cost(cfg), Vec::Constant(3, cfg.control_weight),
          (Vec(3) << -cfg.force_limit, -cfg.force_limit, -cfg.torque_limit)
              .finished(),
          (Vec(3) << cfg.force_limit, cfg.force_limit, cfg.torque_limit)
              .finished(),
          cfg.deterministic),
      cfg_(std::move(cfg)) {
  if (cfg_.mass <= 0.0 || cfg_.inertia <= 0.0 || cfg_.friction <= 0.0) {
    throw ConfigError("manipulation: physical parameters must be positive");
  }
}

Vec ManipulationScenario::true_parameters_tail() const {
  Vec tail(5);
  tail << std::log(cfg_.mass), std::log(cfg_.inertia), cfg_.arm.x(),
      cfg_.arm.y(), std::log(cfg_.friction);
  return tail;
}

GaussianBelief ManipulationScenario::initial_belief() const {
  Vec mean = Vec::Zero(11);
  mean(kRx) = cfg_.r0.x();
  mean(kRy) = cfg_.r0.y();
  mean(kTheta) = cfg_.theta0;
  mean(kLogM) = std::log(cfg_.mass_guess);
  mean(kLogI) = std::log(cfg_.inertia_guess);
  mean(kArmX) = cfg_.arm_guess.x();
  mean(kArmY) = cfg_.arm_guess.y();
  mean(kLogCf) = std::log(cfg_.friction_guess);
  Vec d(11);
  d.head(6).setConstant(cfg_.state_cov0);
  d.tail(5).setConstant(cfg_.param_cov0);
  return GaussianBelief(mean, d.asDiagonal());
}

Vec ManipulationScenario::world_init(RngEngine&) const {
  Vec w = Vec::Zero(11);
  w(kRx) = cfg_.r0.x();
  w(kRy) = cfg_.r0.y();
  w(kTheta) = cfg_.theta0;
  w.tail(5) = true_parameters_tail();
  return w;
}

Vec ManipulationScenario::world_step(const Vec& world, const Vec& u, double dt,
                                     RngEngine& rng) const {
  // Ground truth shares the belief model's dynamics code at the true
  // parameters; the parameter block stays fixed.
  Vec next = world + dt * sys_->f_sys(world, u);
  if (!cfg_.deterministic && cfg_.q_state > 0.0) {
    const double sd = std::sqrt(cfg_.q_state * dt);
    for (int i = 0; i < 6; ++i) next(i) += sd * rng.normal();
  }
  next.tail(5) = world.tail(5);
  return next;
}

std::vector<std::pair<std::string, double>> ManipulationScenario::metrics(
    const Vec& belief_state, const Vec& world) const {
  const GaussianBelief b = unpack(belief_state);
  const double residual = world.head(6).norm();
  Vec est_params(4);
  est_params << std::exp(b.mean(kLogM)), std::exp(b.mean(kLogI)),
      b.mean(kArmX), b.mean(kArmY);
  Vec true_params(4);
  true_params << cfg_.mass, cfg_.inertia, cfg_.arm.x(), cfg_.arm.y();
  return {{"residual_norm", residual},
          {"pose_error", (b.mean.head(3) - world.head(3)).norm()},
          {"param_error", (est_params - true_params).norm()},
          {"belief_trace", b.cov.trace()}};
}

std::shared_ptr<ManipulationScenario> make_manipulation_scenario(
    const ManipulationConfig& cfg) {
  return std::make_shared<ManipulationScenario>(cfg);
}

}  // namespace sacbp::scenarios
