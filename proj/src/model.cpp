#include "gir/model.hpp"

#include <cmath>
#include <string>

namespace gir {

void VarParams::validate() const {
  if (k < 1) fail(ErrorCode::invalid_spec, "dimension k must be >= 1");
  if (p < 1) fail(ErrorCode::invalid_spec, "lag order p must be >= 1");
  if (static_cast<int>(phi.size()) != p) fail(ErrorCode::invalid_spec, "need exactly p coefficient matrices");
  for (const Mat& m : phi) {
    if (m.rows() != k || m.cols() != k) fail(ErrorCode::invalid_spec, "coefficient matrix is not k x k");
    check_finite(m, ErrorCode::invalid_spec, "coefficient matrix");
  }
  if (intercept.size() != 0 && intercept.size() != k) {
    fail(ErrorCode::invalid_spec, "intercept length must equal k");
  }
  if (sigma_u.rows() != k || sigma_u.cols() != k) fail(ErrorCode::invalid_covariance, "sigma_u is not k x k");
  check_finite(sigma_u, ErrorCode::invalid_covariance, "sigma_u");
  if ((sigma_u - sigma_u.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + sigma_u.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::invalid_covariance, "sigma_u is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma_u, Eigen::EigenvaluesOnly);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    fail(ErrorCode::invalid_covariance, "sigma_u has a negative eigenvalue");
  }
}

void SeriesPanel::validate() const {
  if (data.rows() < 1) fail(ErrorCode::insufficient_data, "panel needs at least one row");
  check_finite(data, ErrorCode::invalid_spec, "panel data");
  if (!names.empty() && static_cast<int>(names.size()) != k()) {
    fail(ErrorCode::invalid_spec, "panel names do not match column count");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) fail(ErrorCode::invalid_spec, "duplicate series name: " + names[i]);
    }
  }
}

std::vector<GirSet> gir_recursion(const VarParams& params, int h_max) {
  params.validate();
  if (h_max < 1) fail(ErrorCode::invalid_horizon, "h_max must be >= 1");
  const int p = params.p;
  const int k = params.k;
  std::vector<GirSet> out;
  out.reserve(h_max);
  GirSet first;
  first.h = 1;
  first.coeffs = params.phi;
  out.push_back(std::move(first));
  for (int h = 2; h <= h_max; ++h) {
    const auto& prev = out.back().coeffs;
    GirSet next;
    next.h = h;
    next.coeffs.resize(p);
    for (int j = 0; j < p; ++j) {
      // Phi_{j+1}^{(h-1)} is zero past lag p.
      Mat m = (j + 1 < p) ? prev[j + 1] : Mat::Zero(k, k);
      m += prev[0] * params.phi[j];
      if (!m.allFinite()) {
        fail(ErrorCode::numeric_overflow, "non-finite projection coefficients at horizon " + std::to_string(h));
      }
      next.coeffs[j] = std::move(m);
    }
    out.push_back(std::move(next));
  }
  return out;
}

Mat companion(const VarParams& params) {
  params.validate();
  const int k = params.k, p = params.p;
  Mat C = Mat::Zero(p * k, p * k);
  for (int i = 0; i < p; ++i) C.block(0, i * k, k, k) = params.phi[i];
  if (p > 1) C.block(k, 0, (p - 1) * k, (p - 1) * k).setIdentity();
  return C;
}

std::vector<Mat> sims_irf(const VarParams& params, int n) {
  const int k = params.k;
  std::vector<Mat> psi;
  psi.reserve(n + 1);
  psi.push_back(Mat::Identity(k, k));
  if (n >= 1) {
    auto girs = gir_recursion(params, n);
    for (int j = 1; j <= n; ++j) psi.push_back(girs[j - 1].psi());
  }
  return psi;
}

VarParams dgp_from_roots(const DgpSpec& spec) {
  if (spec.roots.empty() || spec.roots.size() > 2) {
    fail(ErrorCode::invalid_spec, "need 1 or 2 root matrices");
  }
  const int k = spec.k();
  for (const Mat& r : spec.roots) {
    if (r.rows() != k || r.cols() != k) fail(ErrorCode::invalid_spec, "root matrices must be k x k");
    check_finite(r, ErrorCode::invalid_spec, "root matrix");
  }
  VarParams params;
  params.k = k;
  params.p = static_cast<int>(spec.roots.size());
  if (spec.roots.size() == 1) {
    params.phi = {spec.roots[0]};
  } else {
    params.phi = {spec.roots[0] + spec.roots[1], -spec.roots[0] * spec.roots[1]};
  }
  if (spec.rotation.size() > 0) {
    if (spec.rotation.rows() != k || spec.rotation.cols() != k) {
      fail(ErrorCode::invalid_spec, "rotation must be k x k");
    }
    double cond = condition_number(spec.rotation);
    if (!(cond < 1e12)) fail(ErrorCode::invalid_spec, "rotation matrix is singular");
    Mat pi_inv = solve_guarded(spec.rotation, Mat::Identity(k, k), ErrorCode::invalid_spec, "rotation inverse");
    for (Mat& m : params.phi) m = pi_inv * m * spec.rotation;
  }
  params.sigma_u = spec.sigma_u.size() > 0 ? spec.sigma_u : Mat::Identity(k, k);
  params.validate();
  return params;
}

int persistence_class(const DgpSpec& spec) {
  if (spec.roots.empty()) fail(ErrorCode::invalid_spec, "no root matrices");
  int count = 0;
  for (const Mat& r : spec.roots) {
    Eigen::VectorXcd ev = r.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
      if (std::abs(ev(i)) >= 1.0 - kUnitRootTol) ++count;
    }
  }
  return std::min(count, 2);
}

std::vector<Mat> population_autocov(const VarParams& params, int max_lag) {
  params.validate();
  if (max_lag < 0) fail(ErrorCode::invalid_spec, "max_lag must be >= 0");
  const int k = params.k, p = params.p;
  Mat C = companion(params);
  double rho = spectral_radius(C);
  if (!(rho < 1.0)) {
    fail(ErrorCode::stationarity_required,
         "autocovariances need all companion eigenvalues inside the unit circle (spectral radius " +
             std::to_string(rho) + ")");
  }
  Mat Q = Mat::Zero(p * k, p * k);
  Q.topLeftCorner(k, k) = params.sigma_u;
  Mat G0 = dlyap(C, Q);
  std::vector<Mat> gamma;
  gamma.reserve(max_lag + 1);
  // Block (0, j) of the companion variance is Gamma_j.
  for (int j = 0; j <= std::min(max_lag, p - 1); ++j) gamma.push_back(G0.block(0, j * k, k, k));
  for (int j = static_cast<int>(gamma.size()); j <= max_lag; ++j) {
    Mat g = Mat::Zero(k, k);
    for (int i = 0; i < p; ++i) {
      int m = j - 1 - i;
      const Mat& gm = m >= 0 ? gamma[m] : gamma[-m];  // Gamma_{-m} = Gamma_m'
      g += params.phi[i] * (m >= 0 ? gm : Mat(gm.transpose()));
    }
    gamma.push_back(g);
  }
  return gamma;
}

std::vector<double> projection_error_autocov(const VarParams& params, int h, int target_row) {
  if (h < 1) fail(ErrorCode::invalid_horizon, "horizon must be >= 1");
  if (target_row < 0 || target_row >= params.k) fail(ErrorCode::invalid_spec, "target row out of range");
  auto psi = sims_irf(params, h - 1);
  std::vector<Eigen::RowVectorXd> rows(h);
  for (int i = 0; i < h; ++i) rows[i] = psi[i].row(target_row);
  std::vector<double> ge(h, 0.0);
  for (int m = 0; m < h; ++m) {
    double s = 0.0;
    for (int i = 0; i + m < h; ++i) s += rows[i] * params.sigma_u * rows[i + m].transpose();
    ge[m] = s;
  }
  return ge;
}

Mat omega_s_closed(const VarParams& params, int h, int target_row) {
  params.validate();
  if (h < 1) fail(ErrorCode::invalid_horizon, "horizon must be >= 1");
  const int k = params.k, p = params.p;
  auto ge = projection_error_autocov(params, h, target_row);
  Mat omega = Mat::Zero(p * k, p * k);
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      int m = std::abs(a - b);
      if (m < h) omega.block(a * k, b * k, k, k) = ge[m] * params.sigma_u;
    }
  }
  return omega;
}

Mat sigma_zx_closed(const VarParams& params) {
  params.validate();
  const int k = params.k, p = params.p;
  auto psi = sims_irf(params, p - 1);
  Mat psibar = Mat::Zero(p * k, p * k);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) psibar.block(i * k, j * k, k, k) = psi[j - i];
  }
  Mat kron_sigma = Mat::Zero(p * k, p * k);
  for (int i = 0; i < p; ++i) kron_sigma.block(i * k, i * k, k, k) = params.sigma_u;
  return kron_sigma * psibar.transpose();
}

Mat omega_beta_closed(const VarParams& params, int h, int target_row) {
  Mat szx = sigma_zx_closed(params);
  Mat omega_s = omega_s_closed(params, h, target_row);
  const int n = static_cast<int>(szx.rows());
  Mat inv = solve_guarded(szx, Mat::Identity(n, n), ErrorCode::singular_moment, "sigma_zx inverse");
  return inv * omega_s * inv.transpose();
}

Mat omega_ls_closed(const VarParams& params, int h, int target_row) {
  params.validate();
  if (h < 1) fail(ErrorCode::invalid_horizon, "horizon must be >= 1");
  const int k = params.k, p = params.p;
  auto gamma = population_autocov(params, h + p);
  auto ge = projection_error_autocov(params, h, target_row);
  auto gm = [&](int m) -> Mat {
    return m >= 0 ? gamma[m] : Mat(gamma[-m].transpose());
  };
  Mat exx = Mat::Zero(p * k, p * k);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) exx.block(i * k, j * k, k, k) = gm(j - i);
  }
  Mat core = Mat::Zero(p * k, p * k);
  for (int lag = -(h - 1); lag <= h - 1; ++lag) {
    double g_e = ge[std::abs(lag)];
    if (g_e == 0.0) continue;
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) core.block(i * k, j * k, k, k) += gm(j - i - lag) * g_e;
    }
  }
  Mat inv = solve_guarded(exx, Mat::Identity(p * k, p * k), ErrorCode::singular_moment, "E[xx'] inverse");
  return inv * core * inv.transpose();
}

}  // namespace gir
