#include "gir/estimate.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "gir/model.hpp"

namespace gir {

const char* fit_method_name(FitMethod m) {
  switch (m) {
    case FitMethod::ls_proj: return "LS_PROJ";
    case FitMethod::rc_var: return "RC_VAR";
    case FitMethod::two_stage: return "TWO_STAGE";
    case FitMethod::two_stage_infeasible: return "TWO_STAGE_INFEASIBLE";
  }
  return "?";
}

double ProjectionFit::se(int j) const {
  if (j < 0 || j >= cov.rows()) fail(ErrorCode::invalid_spec, "coefficient index out of range");
  double v = cov(j, j);
  if (!(v >= 0.0) || t_bar < 1) fail(ErrorCode::invalid_covariance, "nonpositive variance entry");
  return std::sqrt(v / t_bar);
}

namespace {

// Lag-stacked regressor row (y_s', ..., y_{s-p+1}') plus delta extra lags.
void fill_lag_row(const Mat& y, int s, int p, int delta, bool intercept, Mat& dest, int dest_row) {
  const int k = static_cast<int>(y.cols());
  int pos = 0;
  if (intercept) dest(dest_row, pos++) = 1.0;
  for (int i = 0; i < p + delta; ++i) {
    dest.block(dest_row, pos, 1, k) = y.row(s - i);
    pos += k;
  }
}

struct LsSolution {
  Mat coef;     // d x m
  Mat xtx;      // d x d
  Mat xtx_inv;  // d x d
};

LsSolution solve_ls(const Mat& X, const Mat& Y, ErrorCode code, const std::string& context,
                    double max_cond = 1e12) {
  Mat xtx = X.transpose() * X;
  Eigen::JacobiSVD<Mat> svd(xtx, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1);
  double cond = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
  if (!(cond < max_cond)) {
    fail(code, context + ": regressor condition number " + std::to_string(cond));
  }
  LsSolution out;
  // QR on the tall matrix keeps the point estimate accurate; the squared
  // system is only used for the covariance pieces.
  out.coef = X.colPivHouseholderQr().solve(Y);
  out.xtx = std::move(xtx);
  out.xtx_inv = svd.solve(Mat::Identity(X.cols(), X.cols()));
  return out;
}

}  // namespace

VarFit fit_var_ls(const SeriesPanel& panel, int p, bool intercept) {
  panel.validate();
  const int T = panel.T(), k = panel.k();
  if (p < 1) fail(ErrorCode::invalid_spec, "lag order must be >= 1");
  const int d = (intercept ? 1 : 0) + p * k;
  if (T - p < d + 1) {
    fail(ErrorCode::insufficient_data,
         "VAR fit needs T - p >= " + std::to_string(d + 1) + ", got " + std::to_string(T - p));
  }
  const int n = T - p;
  Mat X(n, d), Y(n, k);
  for (int i = 0; i < n; ++i) {
    fill_lag_row(panel.data, p - 1 + i, p, 0, intercept, X, i);
    Y.row(i) = panel.data.row(p + i);
  }
  LsSolution ls = solve_ls(X, Y, ErrorCode::collinearity, "VAR regressors");
  VarFit fit;
  fit.sample_size = T;
  fit.intercept = intercept;
  fit.residuals = Y - X * ls.coef;
  fit.xtx_inv = ls.xtx_inv;
  VarParams& ph = fit.params_hat;
  ph.k = k;
  ph.p = p;
  if (intercept) ph.intercept = ls.coef.row(0).transpose();
  const int off = intercept ? 1 : 0;
  ph.phi.resize(p);
  for (int i = 0; i < p; ++i) ph.phi[i] = ls.coef.middleRows(off + i * k, k).transpose();
  // Divisor T, matching the covariance estimator's formula.
  ph.sigma_u = fit.residuals.transpose() * fit.residuals / static_cast<double>(T);
  return fit;
}

VarFit pope_bias_correct(const VarFit& fit) {
  const int k = fit.params_hat.k, p = fit.params_hat.p;
  const int pk = p * k;
  const double T = fit.sample_size;
  Mat A = companion(fit.params_hat);
  if (!(spectral_radius(A) < 1.0)) {
    VarFit out = fit;
    out.bias_correction_skipped = true;
    return out;
  }
  Mat sigc = Mat::Zero(pk, pk);
  sigc.topLeftCorner(k, k) = fit.params_hat.sigma_u;
  Mat gamma0 = dlyap(A, sigc);
  Mat At = A.transpose();
  Mat I = Mat::Identity(pk, pk);
  Mat term = solve_guarded(I - At, I, ErrorCode::singular_moment, "bias term (I-A')");
  term += At * solve_guarded(I - At * At, I, ErrorCode::singular_moment, "bias term (I-A'^2)");
  Eigen::VectorXcd ev = A.eigenvalues();
  Eigen::MatrixXcd Atc = At.cast<std::complex<double>>();
  Eigen::MatrixXcd Ic = Eigen::MatrixXcd::Identity(pk, pk);
  Eigen::MatrixXcd eig_sum = Eigen::MatrixXcd::Zero(pk, pk);
  for (int j = 0; j < ev.size(); ++j) {
    eig_sum += ev(j) * (Ic - ev(j) * Atc).partialPivLu().solve(Ic);
  }
  term += eig_sum.real();
  Mat b = sigc * term *
          solve_guarded(gamma0, I, ErrorCode::singular_moment, "companion variance inverse");
  Mat correction = b.topRows(k) / T;  // bias is -b/T, so add b/T back

  VarFit out = fit;
  double scale = 1.0;
  for (;;) {
    VarParams cand = fit.params_hat;
    for (int i = 0; i < p; ++i) cand.phi[i] += scale * correction.middleCols(i * k, k);
    if (spectral_radius(companion(cand)) < 1.0) {
      out.params_hat.phi = cand.phi;
      out.bias_corrected = scale > 0.0;
      break;
    }
    scale -= 0.01;
    if (scale <= 0.0) {
      out.bias_correction_skipped = true;
      return out;
    }
  }
  // Keep the fitted long-run mean fixed; residuals stay the LS residuals,
  // which is what the resampling pipeline draws from.
  if (fit.intercept) {
    Mat phisum = Mat::Identity(k, k);
    for (const Mat& m : fit.params_hat.phi) phisum -= m;
    if (condition_number(phisum) < 1e12) {
      Vec mu = solve_guarded(phisum, fit.params_hat.intercept, ErrorCode::singular_moment, "fitted mean");
      Mat phisum_c = Mat::Identity(k, k);
      for (const Mat& m : out.params_hat.phi) phisum_c -= m;
      out.params_hat.intercept = phisum_c * mu;
    }
  }
  return out;
}

ProjectionFit ls_projection(const SeriesPanel& panel, int p, int h, int target_row, bool intercept,
                            int hac_bandwidth) {
  panel.validate();
  const int T = panel.T(), k = panel.k();
  if (p < 1) fail(ErrorCode::invalid_spec, "lag order must be >= 1");
  if (h < 1) fail(ErrorCode::invalid_horizon, "horizon must be >= 1");
  if (target_row < 0 || target_row >= k) fail(ErrorCode::invalid_spec, "target row out of range");
  const int tbar = T - h - p + 1;
  const int d = (intercept ? 1 : 0) + p * k;
  if (tbar < std::max(d + 1, p * k)) {
    fail(ErrorCode::insufficient_data, "projection sample T-h-p+1 = " + std::to_string(tbar) + " too small");
  }
  Mat X(tbar, d);
  Vec yv(tbar);
  for (int i = 0; i < tbar; ++i) {
    int s = p - 1 + i;
    fill_lag_row(panel.data, s, p, 0, intercept, X, i);
    yv(i) = panel.data(s + h, target_row);
  }
  LsSolution ls = solve_ls(X, yv, ErrorCode::collinearity, "projection regressors");
  Vec coef = ls.coef.col(0);
  Vec e = yv - X * coef;
  int bw = hac_bandwidth < 0 ? h : hac_bandwidth;
  if (bw >= tbar) fail(ErrorCode::invalid_bandwidth, "bandwidth must be below the sample size");
  Mat score = X.array().colwise() * e.array();
  Mat lrv = hac_lrv(score, bw);
  Mat axx_inv = ls.xtx_inv * static_cast<double>(tbar);  // (X'X/n)^{-1}
  Mat cov_full = axx_inv * lrv * axx_inv;

  ProjectionFit fit;
  fit.method = FitMethod::ls_proj;
  fit.h = h;
  fit.p = p;
  fit.k = k;
  fit.target_row = target_row;
  fit.t_bar = tbar;
  const int off = intercept ? 1 : 0;
  if (intercept) fit.intercept_hat = coef(0);
  fit.beta = coef.segment(off, p * k);
  fit.cov = cov_full.block(off, off, p * k, p * k);
  fit.resid = e;
  fit.resid_start = p - 1;
  return fit;
}

Mat hac_lrv(const Mat& score, int bandwidth) {
  const int n = static_cast<int>(score.rows());
  if (bandwidth < 0 || bandwidth >= n) {
    fail(ErrorCode::invalid_bandwidth,
         "need 0 <= bandwidth < n, got bandwidth " + std::to_string(bandwidth) + " with n " + std::to_string(n));
  }
  Mat lrv = score.transpose() * score / static_cast<double>(n);
  for (int j = 1; j <= bandwidth; ++j) {
    double w = 1.0 - static_cast<double>(j) / (bandwidth + 1.0);
    Mat gj = score.bottomRows(n - j).transpose() * score.topRows(n - j) / static_cast<double>(n);
    lrv += w * (gj + gj.transpose());
  }
  return lrv;
}

ProjectionFit rc_var_gir(const VarFit& fit, int h, int target_row) {
  const int k = fit.params_hat.k, p = fit.params_hat.p;
  const int pk = p * k;
  if (h < 1) fail(ErrorCode::invalid_horizon, "horizon must be >= 1");
  if (target_row < 0 || target_row >= k) fail(ErrorCode::invalid_spec, "target row out of range");
  const int tbar = fit.sample_size - h - p + 1;
  if (tbar < pk) fail(ErrorCode::insufficient_data, "horizon too long for the fitted sample");
  Mat C = companion(fit.params_hat);
  std::vector<Mat> powers(h);  // C^0 .. C^{h-1}
  powers[0] = Mat::Identity(pk, pk);
  for (int i = 1; i < h; ++i) {
    powers[i] = powers[i - 1] * C;
    check_finite(powers[i], ErrorCode::numeric_overflow, "companion power");
  }
  Mat Ch = powers[h - 1] * C;
  check_finite(Ch, ErrorCode::numeric_overflow, "companion power");

  // Delta method: beta = row r of C^h; d(C^h) = sum_i C^i dC C^{h-1-i} with
  // dC supported on the top K rows, Cov(vec slopes) = sigma_u kron M.
  const int off = fit.intercept ? 1 : 0;
  Mat M = fit.xtx_inv.block(off, off, pk, pk);
  Mat W(k, h);  // W(:,i) = sigma_u^{1/2} * (row r of C^i restricted to first K cols)
  Mat sig_root = symmetric_sqrt(fit.params_hat.sigma_u);
  for (int i = 0; i < h; ++i) W.col(i) = sig_root * powers[i].row(target_row).head(k).transpose();
  Mat V = Mat::Zero(pk, pk);
  for (int m = 0; m < k; ++m) {
    Mat E = Mat::Zero(pk, pk);
    for (int i = 0; i < h; ++i) E += W(m, i) * powers[h - 1 - i];
    V += E.transpose() * M * E;
  }

  ProjectionFit out;
  out.method = FitMethod::rc_var;
  out.h = h;
  out.p = p;
  out.k = k;
  out.target_row = target_row;
  out.t_bar = tbar;
  out.beta = Ch.row(target_row).transpose();
  out.cov = static_cast<double>(tbar) * V;
  return out;
}

ScorePanel reordered_score(const Vec& resid_proj, const Mat& u_rows, int p, int h) {
  (void)h;
  const int ne = static_cast<int>(resid_proj.size());
  const int k = static_cast<int>(u_rows.cols());
  if (p < 1) fail(ErrorCode::invalid_spec, "lag order must be >= 1");
  const int n = ne - p + 1;
  if (n < 1) fail(ErrorCode::index_contract, "residual series shorter than the lag order");
  if (u_rows.rows() < n) {
    fail(ErrorCode::index_contract, "innovation rows (" + std::to_string(u_rows.rows()) +
                                        ") do not cover the score sample (" + std::to_string(n) + ")");
  }
  ScorePanel out;
  out.s_star.resize(n, p * k);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < p; ++j) {
      out.s_star.row(t).segment(j * k, k) = resid_proj(t + j) * u_rows.row(t);
    }
  }
  return out;
}

Mat robust_cov(const ScorePanel& score, const VarParams& params_hat, int h) {
  (void)h;
  const int n = static_cast<int>(score.s_star.rows());
  const int pk = static_cast<int>(score.s_star.cols());
  if (n < 1) fail(ErrorCode::insufficient_data, "empty score panel");
  Mat omega_s = score.s_star.transpose() * score.s_star / static_cast<double>(n);
  Mat szx = sigma_zx_closed(params_hat);
  Mat inv = solve_guarded(szx, Mat::Identity(pk, pk), ErrorCode::singular_moment, "sigma_zx_hat inverse");
  Mat omega = inv * omega_s * inv.transpose();
  return 0.5 * (omega + omega.transpose());
}

ProjectionFit two_stage(const SeriesPanel& panel, int p, int h, int delta, int target_row,
                        bool intercept, const Mat* provided_u) {
  VarFit first = fit_var_ls(panel, p, intercept);
  return two_stage_with_fit(panel, first, h, delta, target_row, intercept, provided_u);
}

namespace {
ProjectionFit two_stage_impl(const SeriesPanel& panel, const VarFit& first_stage, int h, int delta,
                             int target_row, bool intercept, const Mat* provided_u,
                             const Vec* response, int response_start, bool with_covariance);
}  // namespace

ProjectionFit two_stage_with_fit(const SeriesPanel& panel, const VarFit& first_stage, int h,
                                 int delta, int target_row, bool intercept, const Mat* provided_u,
                                 const Vec* response, int response_start) {
  return two_stage_impl(panel, first_stage, h, delta, target_row, intercept, provided_u, response,
                        response_start, true);
}

ProjectionFit two_stage_point(const SeriesPanel& panel, const VarFit& first_stage, int h, int delta,
                              int target_row, bool intercept) {
  return two_stage_impl(panel, first_stage, h, delta, target_row, intercept, nullptr, nullptr, 0,
                        false);
}

namespace {
ProjectionFit two_stage_impl(const SeriesPanel& panel, const VarFit& first_stage, int h, int delta,
                             int target_row, bool intercept, const Mat* provided_u,
                             const Vec* response, int response_start, bool with_covariance) {
  panel.validate();
  const int T = panel.T(), k = panel.k();
  const int p = first_stage.params_hat.p;
  if (delta < 0 || delta > 2) fail(ErrorCode::invalid_spec, "lag augmentation must be 0, 1 or 2");
  if (h < 1) fail(ErrorCode::invalid_horizon, "horizon must be >= 1");
  if (target_row < 0 || target_row >= k) fail(ErrorCode::invalid_spec, "target row out of range");
  if (provided_u && (provided_u->rows() != T || provided_u->cols() != k)) {
    fail(ErrorCode::index_contract, "provided innovations must be T x k");
  }
  const int tbar = T - h - p + 1;
  const bool feasible = provided_u == nullptr;
  // Feasible scores need u_hat back to time s-p+1 >= p.
  const int s0 = std::max(p + delta - 1, feasible ? 2 * p - 1 : p - 1);
  const int s1 = T - h - 1;
  const int n = s1 - s0 + 1;
  const int d = (intercept ? 1 : 0) + (p + delta) * k;
  if (n < d + 1 || tbar < p * k) {
    fail(ErrorCode::insufficient_data, "two-stage sample of " + std::to_string(n) + " rows is too small");
  }
  auto regressand = [&](int s) -> double {
    if (response) {
      int idx = s - response_start;
      if (idx < 0 || idx >= response->size()) {
        fail(ErrorCode::index_contract, "response override does not cover the projection sample");
      }
      return (*response)(idx);
    }
    return panel.data(s + h, target_row);
  };

  Mat X(n, d), Z(n, d);
  Vec yv(n);
  const int off = intercept ? 1 : 0;
  for (int i = 0; i < n; ++i) {
    int s = s0 + i;
    fill_lag_row(panel.data, s, p, delta, intercept, X, i);
    int pos = 0;
    if (intercept) Z(i, pos++) = 1.0;
    for (int j = 0; j < p; ++j) {
      Z.row(i).segment(pos, k) = feasible ? first_stage.residuals.row(s - j - p) : provided_u->row(s - j);
      pos += k;
    }
    for (int j = 0; j < delta; ++j) {
      Z.row(i).segment(pos, k) = panel.data.row(s - p - j);
      pos += k;
    }
    yv(i) = regressand(s);
  }
  Mat A = Z.transpose() * X;
  double cond = condition_number(A);
  if (!(cond < 1e10)) {
    fail(ErrorCode::weak_instrument,
         "instrument-regressor cross moment has condition number " + std::to_string(cond));
  }
  Vec sol = solve_guarded(A, Mat(Z.transpose() * yv), ErrorCode::weak_instrument, "two-stage solve", 1e10);

  ProjectionFit out;
  out.method = feasible ? FitMethod::two_stage : FitMethod::two_stage_infeasible;
  out.delta = delta;
  out.h = h;
  out.p = p;
  out.k = k;
  out.target_row = target_row;
  out.t_bar = tbar;
  if (intercept) out.intercept_hat = sol(0);
  out.beta = sol.segment(off, p * k);
  out.gamma = sol.tail(delta * k);
  if (!with_covariance) return out;

  // LS projection residuals over the full projection sample feed the scores.
  const int q0 = p - 1, q1 = T - h - 1;
  const int m = q1 - q0 + 1;
  const int dls = off + p * k;
  Mat Xl(m, dls);
  Vec yl(m);
  for (int i = 0; i < m; ++i) {
    int s = q0 + i;
    fill_lag_row(panel.data, s, p, 0, intercept, Xl, i);
    yl(i) = regressand(s);
  }
  LsSolution ls = solve_ls(Xl, yl, ErrorCode::collinearity, "projection regressors");
  Vec e = yl - Xl * ls.coef.col(0);

  // Align residuals and innovations on the same time index.
  const int e_start = q0;
  const int u_start = feasible ? p : 0;
  const int t_lo = std::max(e_start, u_start);
  Vec e_sub = e.segment(t_lo - e_start, e.size() - (t_lo - e_start));
  Mat u_sub = feasible ? Mat(first_stage.residuals.middleRows(t_lo - u_start,
                                                              first_stage.residuals.rows() - (t_lo - u_start)))
                       : Mat(provided_u->middleRows(t_lo, T - t_lo));
  ScorePanel score = reordered_score(e_sub, u_sub, p, h);
  out.cov = robust_cov(score, first_stage.params_hat, h);
  out.resid = e;
  out.resid_start = q0;
  return out;
}
}  // namespace

}  // namespace gir
