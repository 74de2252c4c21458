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

#ifndef SACBP_GAUSSIAN_HPP
#define SACBP_GAUSSIAN_HPP

#include <utility>

#include "sacbp/types.hpp"

namespace sacbp {

/// Gaussian belief (mean, covariance). Packs to a flat belief vector as
/// mean followed by the column-vectorized covariance.
struct GaussianBelief {
  Vec mean;
  Mat cov;

  GaussianBelief() = default;
  GaussianBelief(Vec m, Mat c) : mean(std::move(m)), cov(std::move(c)) {}

  int dim() const { return static_cast<int>(mean.size()); }

  Vec pack() const;
  static GaussianBelief unpack(const Vec& b, int n);

  void symmetrize();

  /// Symmetrize, then add jitter 1e-9 * trace/n * I up to `attempts` times
  /// until the covariance is positive definite. Throws FilterError when the
  /// repair fails.
  void repair(int attempts = 3);

  bool is_positive_definite() const;
  double min_eigenvalue() const;

  /// Draw a state from the belief (mean + chol(cov) * z).
  Vec sample(RngEngine& rng) const;
};

/// Exponentiated entropy of a Gaussian: value = sqrt(det(2 pi e cov)),
/// gradient w.r.t. the covariance entries = 0.5 * value * cov^{-1}.
std::pair<double, Mat> gaussian_entropy_exp(const Mat& cov);

}  // namespace sacbp

#endif  // SACBP_GAUSSIAN_HPP
