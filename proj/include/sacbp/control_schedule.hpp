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

#ifndef SACBP_CONTROL_SCHEDULE_HPP
#define SACBP_CONTROL_SCHEDULE_HPP

#include <vector>

#include "sacbp/types.hpp"

namespace sacbp {

/// Piecewise-constant control on a fixed dt grid with a saturation box.
/// Cell i carries the control in effect on the left-open interval
/// (t0 + i dt, t0 + (i+1) dt]; equivalently, the Euler step that starts at
/// t0 + i dt integrates with values[i]. The left-open convention makes a
/// perturbation on (tau - eps, tau] end exactly at the state reached at tau.
class ControlSchedule {
 public:
  ControlSchedule(double t0, double dt, std::vector<Vec> values, Vec box_lo,
                  Vec box_hi);

  /// Constant schedule covering [t0, t0 + n_cells * dt].
  static ControlSchedule constant(double t0, double dt, int n_cells,
                                  const Vec& u, const Vec& box_lo,
                                  const Vec& box_hi);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  int n_cells() const { return static_cast<int>(values_.size()); }
  double t_end() const { return t0_ + dt_ * n_cells(); }
  const Vec& box_lo() const { return box_lo_; }
  const Vec& box_hi() const { return box_hi_; }
  const std::vector<Vec>& values() const { return values_; }

  const Vec& cell(int i) const { return values_.at(static_cast<size_t>(i)); }
  void set_cell(int i, const Vec& u);

  /// Control in effect at time t under the left-open convention: for
  /// t in (t0 + i dt, t0 + (i+1) dt] this is values[i]. t == t0 maps to
  /// cell 0 so that lookups at the schedule start are well defined.
  const Vec& value_at(double t) const;

  /// Index of the cell whose step starts at time t (grid-aligned).
  int cell_starting_at(double t) const;

  bool within_box(const Vec& u, double tol = 0.0) const;

 private:
  double t0_;
  double dt_;
  std::vector<Vec> values_;
  Vec box_lo_;
  Vec box_hi_;
};

/// Overwrites with v every grid cell whose interval intersects
/// (tau - eps, tau]. eps = 0 returns the schedule unchanged.
/// Throws Error when tau is outside the schedule span, tau - eps <= t0,
/// or v violates the box.
ControlSchedule perturb_control(const ControlSchedule& schedule, double tau,
                                const Vec& v, double eps);

}  // namespace sacbp

#endif  // SACBP_CONTROL_SCHEDULE_HPP
