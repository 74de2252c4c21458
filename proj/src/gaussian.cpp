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

#include "sacbp/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace sacbp {

Vec GaussianBelief::pack() const {
  const int n = dim();
  Vec b(n + n * n);
  b.head(n) = mean;
  b.tail(n * n) = Eigen::Map<const Vec>(cov.data(), n * n);
  return b;
}

GaussianBelief GaussianBelief::unpack(const Vec& b, int n) {
  if (b.size() != n + n * n) {
    throw Error("GaussianBelief::unpack: size mismatch");
  }
  GaussianBelief g;
  g.mean = b.head(n);
  g.cov = Eigen::Map<const Mat>(b.data() + n, n, n);
  return g;
}

void GaussianBelief::symmetrize() {
  cov = 0.5 * (cov + cov.transpose()).eval();
}

bool GaussianBelief::is_positive_definite() const {
  Eigen::LLT<Mat> llt(cov);
  return llt.info() == Eigen::Success;
}

double GaussianBelief::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void GaussianBelief::repair(int attempts) {
  symmetrize();
  const int n = dim();
  for (int k = 0; k <= attempts; ++k) {
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() == Eigen::Success) return;
    if (k == attempts) break;
    const double jitter = 1e-9 * std::max(cov.trace(), 1e-12) / n;
    cov += jitter * Mat::Identity(n, n);
  }
  throw FilterError("GaussianBelief::repair: covariance not positive definite");
}

Vec GaussianBelief::sample(RngEngine& rng) const {
  Eigen::LLT<Mat> llt(cov);
  Mat L;
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    // Fall back to an eigen square root for semidefinite covariances.
    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    L = es.eigenvectors() *
        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  return mean + L * rng.normal_vector(dim());
}

std::pair<double, Mat> gaussian_entropy_exp(const Mat& cov) {
  const int n = static_cast<int>(cov.rows());
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw FilterError("gaussian_entropy_exp: covariance not positive definite");
  }
  // det(2 pi e cov) = (2 pi e)^n det(cov); sqrt via the Cholesky diagonal.
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += std::log(llt.matrixL()(i, i));
  const double value =
      std::exp(0.5 * n * std::log(2.0 * M_PI * M_E) + log_det);
  Mat inv = llt.solve(Mat::Identity(n, n));
  inv = 0.5 * (inv + inv.transpose()).eval();
  return {value, 0.5 * value * inv};
}

}  // namespace sacbp
