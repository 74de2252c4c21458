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

#include "sacbp/numdiff.hpp"

namespace sacbp {

namespace {
inline double step_for(double xi) {
  return std::max(1e-6, 1e-6 * std::abs(xi));
}
}  // namespace

Mat numeric_jacobian(const std::function<Vec(const Vec&)>& fn, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec xp = x;
  Mat jac;
  for (int i = 0; i < n; ++i) {
    const double h = step_for(x(i));
    xp(i) = x(i) + h;
    const Vec fp = fn(xp);
    xp(i) = x(i) - h;
    const Vec fm = fn(xp);
    xp(i) = x(i);
    if (!fp.allFinite() || !fm.allFinite()) {
      throw DivergenceError("numeric_jacobian: non-finite sample");
    }
    if (jac.size() == 0) jac.resize(fp.size(), n);
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  if (jac.size() == 0) jac.resize(static_cast<int>(fn(x).size()), 0);
  return jac;
}

Vec numeric_gradient(const std::function<double(const Vec&)>& fn, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec g(n);
  Vec xp = x;
  for (int i = 0; i < n; ++i) {
    const double h = step_for(x(i));
    xp(i) = x(i) + h;
    const double fp = fn(xp);
    xp(i) = x(i) - h;
    const double fm = fn(xp);
    xp(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw DivergenceError("numeric_gradient: non-finite sample");
    }
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace sacbp
