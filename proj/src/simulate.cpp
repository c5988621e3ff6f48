#include "gir/simulate.hpp"

#include <string>

#include "gir/model.hpp"

namespace gir {

Mat draw_innovations(const Mat& sigma, const InnovationSpec& innovation, int T, RngStream& rng) {
  Mat root = symmetric_sqrt(sigma);
  const int k = static_cast<int>(sigma.rows());
  Mat u(T, k);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < k; ++j) {
      u(t, j) = innovation.law == InnovationLaw::gaussian ? rng.normal() : rng.t_scaled(innovation.df);
    }
  }
  return u * root.transpose();
}

SeriesPanel simulate_var(const VarParams& params, int T, const InnovationSpec& innovation,
                         RngStream& rng, int burn_in) {
  params.validate();
  if (T < params.p + 1) fail(ErrorCode::insufficient_data, "sample size must exceed lag order");
  if (burn_in < 0) fail(ErrorCode::invalid_spec, "burn-in must be >= 0");
  const int k = params.k, p = params.p;
  const int total = T + burn_in;
  Mat u = draw_innovations(params.sigma_u, innovation, total, rng);
  Mat y = Mat::Zero(total, k);
  for (int t = 0; t < total; ++t) {
    Vec acc = u.row(t).transpose();
    if (params.has_intercept()) acc += params.intercept;
    for (int i = 0; i < p; ++i) {
      if (t - 1 - i >= 0) acc += params.phi[i] * y.row(t - 1 - i).transpose();
    }
    y.row(t) = acc.transpose();
  }
  SeriesPanel panel;
  panel.data = y.bottomRows(T);
  panel.origin = SeriesPanel::Origin::simulated;
  panel.names.reserve(k);
  for (int j = 0; j < k; ++j) panel.names.push_back("y" + std::to_string(j + 1));
  check_finite(panel.data, ErrorCode::numeric_overflow, "simulated path");
  return panel;
}

Mat wild_bootstrap_residuals(const Mat& residuals, RngStream& rng) {
  check_finite(residuals, ErrorCode::invalid_spec, "residuals");
  Mat out(residuals.rows(), residuals.cols());
  for (int t = 0; t < residuals.rows(); ++t) out.row(t) = rng.normal() * residuals.row(t);
  return out;
}

Mat bootstrap_initial_block(const SeriesPanel& panel, int p, RngStream& rng) {
  if (p < 1) fail(ErrorCode::invalid_spec, "block length must be >= 1");
  if (panel.T() < p) fail(ErrorCode::insufficient_data, "panel shorter than block length");
  std::int64_t start = rng.uniform_int(0, panel.T() - p);
  return panel.data.middleRows(start, p);
}

Mat mc_gaussian_residuals(const Mat& sigma_hat, int T, RngStream& rng) {
  Mat root = symmetric_sqrt(sigma_hat);
  const int k = static_cast<int>(sigma_hat.rows());
  Mat eps(T, k);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < k; ++j) eps(t, j) = rng.normal();
  return eps * root.transpose();
}

Vec projection_residuals_from_irf(const Mat& u_star, const VarParams& params, int h,
                                  int target_row) {
  const int T = static_cast<int>(u_star.rows());
  const int p = params.p;
  if (h < 1 || h >= T - p) fail(ErrorCode::invalid_horizon, "horizon must satisfy 1 <= h < T - p");
  if (u_star.cols() != params.k) fail(ErrorCode::index_contract, "innovation width mismatch");
  auto psi = sims_irf(params, h - 1);
  std::vector<Eigen::RowVectorXd> rows(h);
  for (int i = 0; i < h; ++i) rows[i] = psi[i].row(target_row);
  const int n = T - h - p + 1;  // t = p..T-h, 1-based
  Vec e(n);
  for (int t = 0; t < n; ++t) {
    int base = t + p - 1;  // 0-based time index of the projection row
    double acc = 0.0;
    for (int i = 0; i < h; ++i) acc += rows[i] * u_star.row(base + h - i).transpose();
    e(t) = acc;
  }
  return e;
}

}  // namespace gir
