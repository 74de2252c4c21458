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

#ifndef SACBP_TYPES_HPP
#define SACBP_TYPES_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sacbp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// State or costate became non-finite during integration.
class DivergenceError : public Error {
  using Error::Error;
};

/// Covariance could not be kept positive definite, or an update is singular.
class FilterError : public Error {
  using Error::Error;
};

class ConfigError : public Error {
  using Error::Error;
};

/// Counter-stable Gaussian source. Each consumer owns its engine, so draws
/// never depend on thread scheduling. normal() uses Box-Muller with a cached
/// spare; the raw engine sequence is a pure function of the seed.
class RngEngine {
 public:
  explicit RngEngine(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    // 53-bit mantissa uniform in [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec normal_vector(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Stream seed for rollout `sample` of control update `epoch`. Pure function
/// of its arguments, so Monte Carlo results do not depend on which worker
/// runs which sample.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t epoch,
                                 std::uint64_t sample) {
  std::uint64_t h = detail::splitmix64(base ^ 0x53414342ULL);
  h = detail::splitmix64(h ^ detail::splitmix64(epoch));
  h = detail::splitmix64(h ^ detail::splitmix64(sample));
  return h;
}

inline bool is_finite(const Vec& v) { return v.allFinite(); }

inline bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

/// True when t is within `tol` of an integer multiple of dt.
inline bool on_grid(double t, double dt, double tol = 1e-9) {
  const double r = t / dt;
  return std::abs(r - std::round(r)) <= tol * std::max(1.0, std::abs(r));
}

inline int grid_index(double t, double t0, double dt) {
  return static_cast<int>(std::llround((t - t0) / dt));
}

}  // namespace sacbp

#endif  // SACBP_TYPES_HPP
