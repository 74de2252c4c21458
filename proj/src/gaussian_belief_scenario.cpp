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

#include "sacbp/scenarios/gaussian_belief_scenario.hpp"

#include <Eigen/Cholesky>

namespace sacbp::scenarios {

namespace {

inline Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

inline Eigen::Map<const Mat> as_matrix(const Vec& x, int n, int offset) {
  return Eigen::Map<const Mat>(x.data() + offset, n, n);
}

}  // namespace

GaussianBeliefScenario::GaussianBeliefScenario(
    std::string name, std::shared_ptr<const GaussianSystemModel> sys,
    Mat state_cost, Vec control_cost_diag, Vec box_lo, Vec box_hi,
    bool deterministic_observations)
    : name_(std::move(name)),
      sys_(std::move(sys)),
      n_(sys_->dim()),
      state_cost_(std::move(state_cost)),
      cu_diag_(std::move(control_cost_diag)),
      box_lo_(std::move(box_lo)),
      box_hi_(std::move(box_hi)),
      deterministic_obs_(deterministic_observations) {
  if (state_cost_.rows() != n_ || state_cost_.cols() != n_) {
    throw ConfigError("GaussianBeliefScenario: C_x dimension mismatch");
  }
  if ((cu_diag_.array() <= 0.0).any()) {
    throw ConfigError("GaussianBeliefScenario: C_u diagonal must be positive");
  }
}

Vec GaussianBeliefScenario::flow(const Vec& x, const Vec& u) const {
  const auto mu = x.head(n_);
  const auto sigma = as_matrix(x, n_, n_);
  const Mat a = sys_->jacobian(mu, u);
  Vec out(state_dim());
  out.head(n_) = sys_->f_sys(mu, u);
  const Mat sdot = a * sigma + sigma * a.transpose() + sys_->process_noise();
  out.tail(n_ * n_) = Eigen::Map<const Vec>(sdot.data(), n_ * n_);
  return out;
}

Vec GaussianBeliefScenario::drift(const Vec& x) const {
  return flow(x, Vec::Zero(control_dim()));
}

Mat GaussianBeliefScenario::control_coefficient(const Vec& x) const {
  const auto mu = x.head(n_);
  const auto sigma = as_matrix(x, n_, n_);
  const int m = control_dim();
  const Vec u0 = Vec::Zero(m);
  const Vec f0 = sys_->f_sys(mu, u0);
  const Mat a0 = sys_->jacobian(mu, u0);
  Mat h = Mat::Zero(state_dim(), m);
  for (int j = 0; j < m; ++j) {
    Vec ej = Vec::Zero(m);
    ej(j) = 1.0;
    h.col(j).head(n_) = sys_->f_sys(mu, ej) - f0;
    const Mat aj = sys_->jacobian(mu, ej) - a0;  // exact for affine A
    const Mat sj = aj * sigma + sigma * aj.transpose();
    h.col(j).tail(n_ * n_) = Eigen::Map<const Vec>(sj.data(), n_ * n_);
  }
  return h;
}

std::vector<Mat> GaussianBeliefScenario::jacobian_mean_sensitivity(
    const Vec& mu, const Vec& u) const {
  std::vector<Mat> da(static_cast<size_t>(n_));
  Vec mup = mu;
  for (int j = 0; j < n_; ++j) {
    const double h = std::max(1e-6, 1e-6 * std::abs(mu(j)));
    mup(j) = mu(j) + h;
    const Mat ap = sys_->jacobian(mup, u);
    mup(j) = mu(j) - h;
    const Mat am = sys_->jacobian(mup, u);
    mup(j) = mu(j);
    da[static_cast<size_t>(j)] = (ap - am) / (2.0 * h);
  }
  return da;
}

std::vector<Mat> GaussianBeliefScenario::obs_jacobian_mean_sensitivity(
    const Vec& mu, const Vec& u) const {
  std::vector<Mat> dc(static_cast<size_t>(n_));
  Vec mup = mu;
  for (int j = 0; j < n_; ++j) {
    const double h = std::max(1e-6, 1e-6 * std::abs(mu(j)));
    mup(j) = mu(j) + h;
    const Mat cp = sys_->obs_jacobian(mup, u);
    mup(j) = mu(j) - h;
    const Mat cm = sys_->obs_jacobian(mup, u);
    mup(j) = mu(j);
    dc[static_cast<size_t>(j)] = (cp - cm) / (2.0 * h);
  }
  return dc;
}

Vec GaussianBeliefScenario::flow_vjp(const Vec& x, const Vec& u,
                                     const Vec& rho) const {
  const auto mu = x.head(n_);
  const auto sigma = as_matrix(x, n_, n_);
  const auto rho_mu = rho.head(n_);
  const auto p = as_matrix(rho, n_, n_);
  const Mat a = sys_->jacobian(mu, u);
  const std::vector<Mat> da = jacobian_mean_sensitivity(mu, u);

  Vec out(state_dim());
  out.head(n_) = a.transpose() * rho_mu;
  // Sensitivity of the covariance flow to the mean enters through dA/dmu:
  // <dA_j, (P + P^T) Sigma>_F per mean coordinate.
  const Mat ps = (p + p.transpose()) * sigma;
  for (int j = 0; j < n_; ++j) {
    out(j) += (da[static_cast<size_t>(j)].array() * ps.array()).sum();
  }
  const Mat pdot = a.transpose() * p + p * a;
  out.tail(n_ * n_) = Eigen::Map<const Vec>(pdot.data(), n_ * n_);
  return out;
}

Vec GaussianBeliefScenario::flow_jvp(const Vec& x, const Vec& u,
                                     const Vec& psi) const {
  const auto mu = x.head(n_);
  const auto sigma = as_matrix(x, n_, n_);
  const auto psi_mu = psi.head(n_);
  const auto psi_s = as_matrix(psi, n_, n_);
  const Mat a = sys_->jacobian(mu, u);
  const std::vector<Mat> da = jacobian_mean_sensitivity(mu, u);

  Vec out(state_dim());
  out.head(n_) = a * psi_mu;
  Mat sdot = a * psi_s + psi_s * a.transpose();
  for (int j = 0; j < n_; ++j) {
    const Mat& daj = da[static_cast<size_t>(j)];
    sdot += psi_mu(j) * (daj * sigma + sigma * daj.transpose());
  }
  out.tail(n_ * n_) = Eigen::Map<const Vec>(sdot.data(), n_ * n_);
  return out;
}

Vec GaussianBeliefScenario::jump(const Vec& x_pre, const Vec& y,
                                 const Vec& u_epoch) const {
  return ekf_update(unpack(x_pre), y, *sys_, u_epoch).pack();
}

namespace {

/// Shared pieces of the EKF update linearization at a fixed (belief, y, u).
struct EkfUpdateLin {
  Mat m;        // I - K C
  Vec z;        // C^T S^{-1} innovation
  std::vector<Vec> dmu;    // d mu+ / d mu_j
  std::vector<Mat> dsraw;  // d (Sigma - K C Sigma) / d mu_j
};

EkfUpdateLin linearize_ekf_update(const GaussianSystemModel& sys,
                                  const GaussianBelief& b, const Vec& y,
                                  const Vec& u, const std::vector<Mat>& dc) {
  const int n = b.dim();
  const Mat c = sys.obs_jacobian(b.mean, u);
  const Mat s = c * b.cov * c.transpose() + sys.obs_noise();
  Eigen::LLT<Mat> sllt(s);
  if (sllt.info() != Eigen::Success) {
    throw FilterError("ekf jump linearization: singular innovation covariance");
  }
  const Mat k = sllt.solve((b.cov * c.transpose()).transpose()).transpose();
  const Vec inno = y - sys.observe(b.mean, u);
  const Vec zeta = sllt.solve(inno);

  EkfUpdateLin lin;
  lin.m = Mat::Identity(n, n) - k * c;
  lin.z = c.transpose() * zeta;
  lin.dmu.resize(static_cast<size_t>(n));
  lin.dsraw.resize(static_cast<size_t>(n));
  const Mat sc = b.cov * c.transpose();  // Sigma C^T
  for (int j = 0; j < n; ++j) {
    const Mat& dcj = dc[static_cast<size_t>(j)];
    const Mat ds_j = dcj * sc + (dcj * sc).transpose();  // d S / d mu_j
    // dK_j = Sigma dC_j^T S^{-1} - K dS_j S^{-1}
    const Mat dk_j = sllt.solve(dcj * b.cov).transpose() -
                     k * sllt.solve(ds_j).transpose();
    Vec dmu_j = Vec::Zero(n);
    dmu_j(j) = 1.0;
    dmu_j += dk_j * inno - k * c.col(j);
    lin.dmu[static_cast<size_t>(j)] = dmu_j;
    lin.dsraw[static_cast<size_t>(j)] = -(dk_j * c + k * dcj) * b.cov;
  }
  return lin;
}

}  // namespace

Vec GaussianBeliefScenario::jump_vjp(const Vec& x_pre, const Vec& y,
                                     const Vec& u_epoch, const Vec& rho) const {
  const GaussianBelief b = unpack(x_pre);
  const std::vector<Mat> dc = obs_jacobian_mean_sensitivity(b.mean, u_epoch);
  const EkfUpdateLin lin = linearize_ekf_update(*sys_, b, y, u_epoch, dc);
  const auto rho_mu = rho.head(n_);
  const Mat p_sym = sym(as_matrix(rho, n_, n_));  // adjoint of symmetrization

  Vec out(state_dim());
  for (int j = 0; j < n_; ++j) {
    out(j) = lin.dmu[static_cast<size_t>(j)].dot(rho_mu) +
             (lin.dsraw[static_cast<size_t>(j)].array() * p_sym.array()).sum();
  }
  const Mat pout = lin.m.transpose() * rho_mu * lin.z.transpose() +
                   lin.m.transpose() * p_sym * lin.m;
  out.tail(n_ * n_) = Eigen::Map<const Vec>(pout.data(), n_ * n_);
  return out;
}

Vec GaussianBeliefScenario::jump_jvp(const Vec& x_pre, const Vec& y,
                                     const Vec& u_epoch, const Vec& psi) const {
  const GaussianBelief b = unpack(x_pre);
  const std::vector<Mat> dc = obs_jacobian_mean_sensitivity(b.mean, u_epoch);
  const EkfUpdateLin lin = linearize_ekf_update(*sys_, b, y, u_epoch, dc);
  const auto psi_mu = psi.head(n_);
  const Mat psi_s = as_matrix(psi, n_, n_);

  Vec out(state_dim());
  out.head(n_) = lin.m * psi_s * lin.z;
  Mat sout = sym(lin.m * psi_s * lin.m.transpose());
  for (int j = 0; j < n_; ++j) {
    out.head(n_) += psi_mu(j) * lin.dmu[static_cast<size_t>(j)];
    sout += psi_mu(j) * sym(lin.dsraw[static_cast<size_t>(j)]);
  }
  out.tail(n_ * n_) = Eigen::Map<const Vec>(sout.data(), n_ * n_);
  return out;
}

Vec GaussianBeliefScenario::sample_observation(const Vec& x_pre,
                                               const Vec& u_epoch,
                                               RngEngine& rng) const {
  const GaussianBelief b = unpack(x_pre);
  if (deterministic_obs_) return sys_->observe(b.mean, u_epoch);
  const Vec latent = b.sample(rng);
  const Mat r = sys_->obs_noise();
  Eigen::LLT<Mat> llt(r);
  return sys_->observe(latent, u_epoch) +
         llt.matrixL() * rng.normal_vector(sys_->obs_dim());
}

Vec GaussianBeliefScenario::expected_observation(const Vec& x_pre,
                                                 const Vec& u_epoch) const {
  return sys_->observe(x_pre.head(n_), u_epoch);
}

double GaussianBeliefScenario::running_cost(const Vec& x, const Vec& u) const {
  const auto mu = x.head(n_);
  const auto sigma = as_matrix(x, n_, n_);
  return 0.5 * mu.dot(state_cost_ * mu) +
         0.5 * (state_cost_ * sigma).trace() +
         0.5 * u.cwiseProduct(cu_diag_).dot(u);
}

Vec GaussianBeliefScenario::running_cost_gradient(const Vec& x,
                                                  const Vec& /*u*/) const {
  Vec g(state_dim());
  g.head(n_) = state_cost_ * x.head(n_);
  const Mat gs = 0.5 * state_cost_;
  g.tail(n_ * n_) = Eigen::Map<const Vec>(gs.data(), n_ * n_);
  return g;
}

double GaussianBeliefScenario::terminal_cost(const Vec& x) const {
  const auto mu = x.head(n_);
  const auto sigma = as_matrix(x, n_, n_);
  return 0.5 * mu.dot(state_cost_ * mu) + 0.5 * (state_cost_ * sigma).trace();
}

Vec GaussianBeliefScenario::terminal_cost_gradient(const Vec& x) const {
  return running_cost_gradient(x, Vec::Zero(control_dim()));
}

GaussianBelief GaussianBeliefScenario::initial_belief() const {
  return GaussianBelief(Vec::Zero(n_), Mat::Identity(n_, n_));
}

Vec GaussianBeliefScenario::world_init(RngEngine& rng) const {
  const GaussianBelief b0 = initial_belief();
  if (deterministic_obs_) return b0.mean;
  return b0.sample(rng);
}

Vec GaussianBeliefScenario::initial_belief_state(const Vec& /*world*/,
                                                 RngEngine& /*rng*/) const {
  return initial_belief().pack();
}

Vec GaussianBeliefScenario::world_step(const Vec& world, const Vec& u, double dt,
                                       RngEngine& rng) const {
  Vec next = world + dt * sys_->f_sys(world, u);
  if (!deterministic_obs_) {
    Eigen::LLT<Mat> llt(sys_->process_noise());
    next += std::sqrt(dt) * (llt.matrixL() * rng.normal_vector(n_));
  }
  return next;
}

Vec GaussianBeliefScenario::world_observe(const Vec& world, const Vec& u,
                                          RngEngine& rng) const {
  if (deterministic_obs_) return sys_->observe(world, u);
  Eigen::LLT<Mat> llt(sys_->obs_noise());
  return sys_->observe(world, u) +
         llt.matrixL() * rng.normal_vector(sys_->obs_dim());
}

std::vector<std::pair<std::string, double>> GaussianBeliefScenario::metrics(
    const Vec& belief_state, const Vec& world) const {
  const GaussianBelief b = unpack(belief_state);
  return {{"mean_error", (b.mean - world).norm()},
          {"belief_trace", b.cov.trace()}};
}

}  // namespace sacbp::scenarios
