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

#ifndef SACBP_FILTERS_HPP
#define SACBP_FILTERS_HPP

#include <functional>
#include <utility>

#include "sacbp/gaussian.hpp"
#include "sacbp/types.hpp"

namespace sacbp {

// ---------------------------------------------------------------------------
// Scalar Kalman update and categorical update (the bounded-jump fixtures).
// ---------------------------------------------------------------------------

/// Scalar Kalman update for observation y = x + v, v ~ N(0, 1):
/// (mu, s) -> ((mu + s y)/(s + 1), s/(s + 1)). Requires s > 0.
std::pair<double, double> kf1d_update(double mu, double s, double y);

/// Unnormalized categorical Bayes update: b_i <- p(y|i) b_i.
/// `likelihood` holds p(y|i) for the observed label. Throws FilterError when
/// the result is all-zero (contradictory observation).
Vec categorical_update(const Vec& weights, const Vec& likelihood);

// ---------------------------------------------------------------------------
// Unscented transform update.
// ---------------------------------------------------------------------------

struct UkfParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.0;
};

/// Measurement update with sigma points over the state augmented with the
/// observation noise: z = obs(x, v), v ~ N(0, R). Handles noise entering
/// the measurement nonlinearly. Covariance is symmetrized and jitter-repaired.
GaussianBelief ukf_update_augmented(
    const GaussianBelief& prior,
    const std::function<Vec(const Vec& x, const Vec& v)>& obs, const Mat& R,
    const Vec& y, const UkfParams& params = {});

/// Brownian prediction for a random-walk target: mean unchanged,
/// cov += Q * dt.
GaussianBelief brownian_predict(const GaussianBelief& belief, const Mat& Q,
                                double dt);

/// One target-tracking UKF step: Brownian predict over dt, then a range
/// update d = ||q - p + v||, v ~ N(0, R0 + ||q - p|| R1) evaluated at the
/// predicted mean (approximated observation covariance).
GaussianBelief ukf_range_step(const GaussianBelief& belief,
                              const Eigen::Vector2d& robot_pos, double range,
                              double dt, const Mat& Q, const Mat& R0,
                              const Mat& R1, const UkfParams& params = {});

// ---------------------------------------------------------------------------
// Continuous-discrete extended Kalman filter.
// ---------------------------------------------------------------------------

/// Underlying system behind a Gaussian belief: continuous dynamics
/// xdot = f_sys(x, u) with process noise Q, and a discrete observation
/// y = observe(x, u) + v, v ~ N(0, R). The observation may depend on the
/// control in effect at the epoch.
class GaussianSystemModel {
 public:
  virtual ~GaussianSystemModel() = default;
  virtual int dim() const = 0;
  virtual int control_dim() const = 0;
  virtual int obs_dim() const = 0;
  virtual Vec f_sys(const Vec& x, const Vec& u) const = 0;
  /// Jacobian of f_sys w.r.t. the state, evaluated at (x, u).
  virtual Mat jacobian(const Vec& x, const Vec& u) const = 0;
  virtual Mat process_noise() const = 0;
  virtual Vec observe(const Vec& x, const Vec& u) const = 0;
  /// Jacobian of observe w.r.t. the state.
  virtual Mat obs_jacobian(const Vec& x, const Vec& u) const = 0;
  virtual Mat obs_noise() const = 0;
};

/// One explicit-Euler step of the prediction ODE
///   mu_dot = f_sys(mu, u),  Sigma_dot = A Sigma + Sigma A^T + Q,
/// with A evaluated at the mean. The result is symmetrized.
GaussianBelief ekf_predict_continuous(const GaussianBelief& belief, const Vec& u,
                                      const GaussianSystemModel& sys, double dt);

/// Standard EKF innovation update; covariance symmetrized and jitter-repaired.
GaussianBelief ekf_update(const GaussianBelief& belief, const Vec& y,
                          const GaussianSystemModel& sys, const Vec& u_epoch);

}  // namespace sacbp

#endif  // SACBP_FILTERS_HPP
