#pragma once

#include <vector>

#include "gir/types.hpp"

namespace gir {

struct VarFit {
  VarParams params_hat;  // sigma_u holds the fitted innovation covariance
  Mat residuals;         // (T-p) x k, row 0 is time index p (0-based)
  int sample_size = 0;   // T
  bool intercept = true;
  bool bias_corrected = false;
  bool bias_correction_skipped = false;  // stationarity guard declined to correct
  Mat xtx_inv;           // (X'X)^{-1} of the VAR regression, intercept first

  int resid_start() const { return params_hat.p; }
};

enum class FitMethod { ls_proj, rc_var, two_stage, two_stage_infeasible };

const char* fit_method_name(FitMethod m);

/// Estimator output. The covariance is stored on the asymptotic scale:
/// se_j = sqrt(cov(j,j) / t_bar).
struct ProjectionFit {
  FitMethod method = FitMethod::ls_proj;
  int delta = 0;       // lag augmentation (two-stage only)
  int h = 1;
  int p = 0;           // lag order
  int k = 0;           // series count
  int target_row = 0;  // 0-based equation index
  Vec beta;            // pK lag coefficients of the target equation
  Vec gamma;           // delta*K nuisance coefficients (lag-augmented only)
  double intercept_hat = 0.0;
  Mat cov;             // pK x pK
  int t_bar = 0;       // T - h - p + 1
  Vec resid;           // LS projection residuals e_{t,h}
  int resid_start = 0; // 0-based time index of resid(0)

  double se(int j) const;
};

/// Reordered scores s*_{t,h}; row t stacks e_{t+j-1,h} * u_t over blocks j.
struct ScorePanel {
  Mat s_star;  // n x pK
};

VarFit fit_var_ls(const SeriesPanel& panel, int p, bool intercept = true);

/// First-order analytical bias correction of the slope coefficients, shrunk
/// toward zero whenever the corrected companion would leave the unit circle.
/// Non-stationary fits are returned unchanged with the skip flag set.
VarFit pope_bias_correct(const VarFit& fit);

/// Multi-horizon LS projection with Bartlett-kernel HAC covariance.
/// bandwidth -1 means the default bandwidth h.
ProjectionFit ls_projection(const SeriesPanel& panel, int p, int h, int target_row = 0,
                            bool intercept = true, int hac_bandwidth = -1);

/// Bartlett-weighted long-run variance of a score sample.
Mat hac_lrv(const Mat& score, int bandwidth);

/// Recursive VAR estimate: target row of the companion power, delta-method
/// covariance from the fitted slope covariance.
ProjectionFit rc_var_gir(const VarFit& fit, int h, int target_row = 0);

/// Two-stage estimator with delta-lag augmentation. provided_u switches to
/// the infeasible variant (true innovations, T x k, row t is time t).
ProjectionFit two_stage(const SeriesPanel& panel, int p, int h, int delta = 0, int target_row = 0,
                        bool intercept = true, const Mat* provided_u = nullptr);

/// Same, reusing a precomputed full-sample first-stage fit. response, when
/// given, replaces y(s+h, target_row) as the regressand; response(0)
/// corresponds to projection row s = response_start.
ProjectionFit two_stage_with_fit(const SeriesPanel& panel, const VarFit& first_stage, int h,
                                 int delta = 0, int target_row = 0, bool intercept = true,
                                 const Mat* provided_u = nullptr, const Vec* response = nullptr,
                                 int response_start = 0);

/// Point estimate only (no covariance); for simulation studies that measure
/// sampling dispersion directly.
ProjectionFit two_stage_point(const SeriesPanel& panel, const VarFit& first_stage, int h,
                              int delta = 0, int target_row = 0, bool intercept = true);

/// e and u must be aligned: row i of u and entry i of e refer to the same
/// time index. Produces n_e - p + 1 rows.
ScorePanel reordered_score(const Vec& resid_proj, const Mat& u_rows, int p, int h);

/// Omega_beta_hat = Sigma_zx_hat^{-1} Omega_s_hat Sigma_zx_hat'^{-1} with
/// Omega_s_hat the sample second moment of the reordered scores and
/// Sigma_zx_hat from the fitted VAR.
Mat robust_cov(const ScorePanel& score, const VarParams& params_hat, int h);

}  // namespace gir
