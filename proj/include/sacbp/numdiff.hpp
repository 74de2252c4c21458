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

#ifndef SACBP_NUMDIFF_HPP
#define SACBP_NUMDIFF_HPP

#include <functional>

#include "sacbp/types.hpp"

namespace sacbp {

/// Central-difference Jacobian of fn at x. Per-coordinate step
/// h_i = max(1e-6, 1e-6 |x_i|). Used wherever a scenario supplies no
/// analytic derivative. Throws DivergenceError on non-finite samples.
Mat numeric_jacobian(const std::function<Vec(const Vec&)>& fn, const Vec& x);

/// Central-difference gradient of a scalar function.
Vec numeric_gradient(const std::function<double(const Vec&)>& fn, const Vec& x);

}  // namespace sacbp

#endif  // SACBP_NUMDIFF_HPP
