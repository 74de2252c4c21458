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

#include "sacbp/control_schedule.hpp"

#include <cmath>

namespace sacbp {

ControlSchedule::ControlSchedule(double t0, double dt, std::vector<Vec> values,
                                 Vec box_lo, Vec box_hi)
    : t0_(t0),
      dt_(dt),
      values_(std::move(values)),
      box_lo_(std::move(box_lo)),
      box_hi_(std::move(box_hi)) {
  if (dt_ <= 0.0) throw Error("ControlSchedule: dt must be positive");
  if (values_.empty()) throw Error("ControlSchedule: values must be non-empty");
  if (box_lo_.size() != box_hi_.size() ||
      box_lo_.size() != values_.front().size()) {
    throw Error("ControlSchedule: box/control dimension mismatch");
  }
  for (const Vec& u : values_) {
    if (!within_box(u, 1e-12)) {
      throw Error("ControlSchedule: value outside saturation box");
    }
  }
}

ControlSchedule ControlSchedule::constant(double t0, double dt, int n_cells,
                                          const Vec& u, const Vec& box_lo,
                                          const Vec& box_hi) {
  return ControlSchedule(t0, dt, std::vector<Vec>(static_cast<size_t>(n_cells), u),
                         box_lo, box_hi);
}

void ControlSchedule::set_cell(int i, const Vec& u) {
  if (!within_box(u, 1e-12)) throw Error("ControlSchedule: value outside box");
  values_.at(static_cast<size_t>(i)) = u;
}

const Vec& ControlSchedule::value_at(double t) const {
  // ceil((t - t0)/dt) - 1 maps (t0 + i dt, t0 + (i+1) dt] to i; a small
  // tolerance keeps grid-aligned times on their intended boundary.
  const double r = (t - t0_) / dt_;
  int idx = static_cast<int>(std::ceil(r - 1e-9)) - 1;
  if (idx < 0) idx = 0;
  if (idx >= n_cells()) {
    throw Error("ControlSchedule: lookup past schedule end");
  }
  return values_[static_cast<size_t>(idx)];
}

int ControlSchedule::cell_starting_at(double t) const {
  const int idx = static_cast<int>(std::llround((t - t0_) / dt_));
  if (idx < 0 || idx >= n_cells()) {
    throw Error("ControlSchedule: step start outside schedule span");
  }
  return idx;
}

bool ControlSchedule::within_box(const Vec& u, double tol) const {
  return (u.array() >= box_lo_.array() - tol).all() &&
         (u.array() <= box_hi_.array() + tol).all();
}

ControlSchedule perturb_control(const ControlSchedule& schedule, double tau,
                                const Vec& v, double eps) {
  if (eps < 0.0) throw Error("perturb_control: eps must be nonnegative");
  if (eps == 0.0) return schedule;
  if (!schedule.within_box(v, 1e-12)) {
    throw Error("perturb_control: v outside saturation box");
  }
  const double t0 = schedule.t0();
  const double dt = schedule.dt();
  if (tau <= t0 || tau > schedule.t_end() + 1e-9) {
    throw Error("perturb_control: tau outside schedule span");
  }
  if (tau - eps <= t0 - 1e-12) {
    throw Error("perturb_control: perturbation window starts before t0");
  }
  // Cells intersecting (tau - eps, tau]: indices i with
  // t0 + i dt < tau  and  t0 + (i+1) dt > tau - eps.
  const double tol = 1e-9 * dt;
  int first = static_cast<int>(std::floor((tau - eps - t0) / dt + tol));
  if (t0 + (first + 1) * dt <= tau - eps + tol) ++first;  // boundary-exact start
  int last = static_cast<int>(std::ceil((tau - t0) / dt - tol)) - 1;
  first = std::max(first, 0);
  last = std::min(last, schedule.n_cells() - 1);
  ControlSchedule out = schedule;
  for (int i = first; i <= last; ++i) out.set_cell(i, v);
  return out;
}

}  // namespace sacbp
