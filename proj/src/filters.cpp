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

#include "sacbp/filters.hpp"

#include <Eigen/Cholesky>
#include <vector>

namespace sacbp {

std::pair<double, double> kf1d_update(double mu, double s, double y) {
  if (s <= 0.0) throw FilterError("kf1d_update: variance must be positive");
  return {(mu + s * y) / (s + 1.0), s / (s + 1.0)};
}

Vec categorical_update(const Vec& weights, const Vec& likelihood) {
  if (weights.size() != likelihood.size()) {
    throw Error("categorical_update: size mismatch");
  }
  if ((weights.array() < 0.0).any()) {
    throw FilterError("categorical_update: negative weight");
  }
  Vec out = weights.cwiseProduct(likelihood);
  if (out.maxCoeff() <= 0.0) {
    throw FilterError("categorical_update: contradictory observation");
  }
  return out;
}

namespace {

struct SigmaPoints {
  std::vector<Vec> points;
  std::vector<double> w_mean;
  std::vector<double> w_cov;
};

SigmaPoints make_sigma_points(const Vec& mean, const Mat& cov,
                              const UkfParams& p) {
  const int n = static_cast<int>(mean.size());
  const double lambda = p.alpha * p.alpha * (n + p.kappa) - n;
  Eigen::LLT<Mat> llt(((n + lambda) * cov).eval());
  if (llt.info() != Eigen::Success) {
    throw FilterError("ukf: sigma-point covariance not positive definite");
  }
  const Mat L = llt.matrixL();
  SigmaPoints sp;
  sp.points.reserve(2 * n + 1);
  sp.w_mean.reserve(2 * n + 1);
  sp.w_cov.reserve(2 * n + 1);
  sp.points.push_back(mean);
  sp.w_mean.push_back(lambda / (n + lambda));
  sp.w_cov.push_back(lambda / (n + lambda) + 1.0 - p.alpha * p.alpha + p.beta);
  for (int i = 0; i < n; ++i) {
    sp.points.push_back(mean + L.col(i));
    sp.points.push_back(mean - L.col(i));
    const double w = 0.5 / (n + lambda);
    sp.w_mean.push_back(w);
    sp.w_mean.push_back(w);
    sp.w_cov.push_back(w);
    sp.w_cov.push_back(w);
  }
  return sp;
}

}  // namespace

GaussianBelief ukf_update_augmented(
    const GaussianBelief& prior,
    const std::function<Vec(const Vec& x, const Vec& v)>& obs, const Mat& R,
    const Vec& y, const UkfParams& params) {
  const int n = prior.dim();
  const int nv = static_cast<int>(R.rows());
  Vec aug_mean(n + nv);
  aug_mean.head(n) = prior.mean;
  aug_mean.tail(nv).setZero();
  Mat aug_cov = Mat::Zero(n + nv, n + nv);
  aug_cov.topLeftCorner(n, n) = prior.cov;
  aug_cov.bottomRightCorner(nv, nv) = R;

  const SigmaPoints sp = make_sigma_points(aug_mean, aug_cov, params);
  const int n_pts = static_cast<int>(sp.points.size());
  std::vector<Vec> z(static_cast<size_t>(n_pts));
  for (int i = 0; i < n_pts; ++i) {
    z[static_cast<size_t>(i)] =
        obs(sp.points[static_cast<size_t>(i)].head(n),
            sp.points[static_cast<size_t>(i)].tail(nv));
  }
  const int q = static_cast<int>(z.front().size());
  Vec z_mean = Vec::Zero(q);
  for (int i = 0; i < n_pts; ++i) z_mean += sp.w_mean[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
  Mat S = Mat::Zero(q, q);
  Mat Cxz = Mat::Zero(n, q);
  for (int i = 0; i < n_pts; ++i) {
    const Vec dz = z[static_cast<size_t>(i)] - z_mean;
    const Vec dx = sp.points[static_cast<size_t>(i)].head(n) - prior.mean;
    S += sp.w_cov[static_cast<size_t>(i)] * dz * dz.transpose();
    Cxz += sp.w_cov[static_cast<size_t>(i)] * dx * dz.transpose();
  }
  Eigen::LLT<Mat> sllt(S);
  if (sllt.info() != Eigen::Success) {
    throw FilterError("ukf_update_augmented: singular innovation covariance");
  }
  const Mat K = sllt.solve(Cxz.transpose()).transpose();
  GaussianBelief post;
  post.mean = prior.mean + K * (y - z_mean);
  post.cov = prior.cov - K * S * K.transpose();
  post.repair();
  return post;
}

GaussianBelief brownian_predict(const GaussianBelief& belief, const Mat& Q,
                                double dt) {
  GaussianBelief out = belief;
  out.cov += Q * dt;
  out.symmetrize();
  return out;
}

GaussianBelief ukf_range_step(const GaussianBelief& belief,
                              const Eigen::Vector2d& robot_pos, double range,
                              double dt, const Mat& Q, const Mat& R0,
                              const Mat& R1, const UkfParams& params) {
  const GaussianBelief pred = brownian_predict(belief, Q, dt);
  // Approximated observation covariance R(p, mu): evaluated at the predicted
  // mean rather than the unknown true target position.
  const Mat R = R0 + (pred.mean.head<2>() - robot_pos).norm() * R1;
  Vec yv(1);
  yv(0) = range;
  auto obs = [&robot_pos](const Vec& q, const Vec& v) {
    Vec d(1);
    d(0) = (q.head<2>() - robot_pos + v.head<2>()).norm();
    return d;
  };
  return ukf_update_augmented(pred, obs, R, yv, params);
}

GaussianBelief ekf_predict_continuous(const GaussianBelief& belief, const Vec& u,
                                      const GaussianSystemModel& sys,
                                      double dt) {
  const Mat A = sys.jacobian(belief.mean, u);
  GaussianBelief out;
  out.mean = belief.mean + dt * sys.f_sys(belief.mean, u);
  out.cov = belief.cov + dt * (A * belief.cov + belief.cov * A.transpose() +
                               sys.process_noise());
  out.symmetrize();
  if (!out.mean.allFinite() || !out.cov.allFinite()) {
    throw DivergenceError("ekf_predict_continuous: non-finite belief");
  }
  return out;
}

GaussianBelief ekf_update(const GaussianBelief& belief, const Vec& y,
                          const GaussianSystemModel& sys, const Vec& u_epoch) {
  const Mat C = sys.obs_jacobian(belief.mean, u_epoch);
  const Mat S = C * belief.cov * C.transpose() + sys.obs_noise();
  Eigen::LLT<Mat> sllt(S);
  if (sllt.info() != Eigen::Success) {
    throw FilterError("ekf_update: singular innovation covariance");
  }
  const Mat K = sllt.solve((belief.cov * C.transpose()).transpose()).transpose();
  GaussianBelief post;
  post.mean = belief.mean + K * (y - sys.observe(belief.mean, u_epoch));
  post.cov = belief.cov - K * C * belief.cov;
  post.repair();
  return post;
}

}  // namespace sacbp
