#pragma once

#include <string>
#include <vector>

#include "gir/estimate.hpp"
#include "gir/rng.hpp"

namespace gir {

struct WaldResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::string restriction;
};

enum class CiMethod { z, bootstrap_t, supt, lmc_inversion, mmc_inversion };

struct CiResult {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  CiMethod method = CiMethod::z;
};

/// How to (re)fit inside resampling loops.
struct EstimatorSpec {
  FitMethod method = FitMethod::two_stage;
  int p = 1;
  int delta = 0;
  int target_row = 0;
  bool intercept = true;
  int hac_bandwidth = -1;         // ls_proj only; -1 means h
  bool bias_correct = true;       // Pope correction of the bootstrap VAR
  bool center_on_two_stage = false;  // pivot center: RC-VAR unless flagged
};

/// Fits a panel with the configured estimator. provided_u feeds the
/// infeasible two-stage variant.
ProjectionFit fit_with_spec(const SeriesPanel& panel, const EstimatorSpec& spec, int h,
                            const Mat* provided_u = nullptr);

/// Wald test of H0: beta_S = values on an index subset (values omitted = zero).
WaldResult wald_subset(const ProjectionFit& fit, const std::vector<int>& coeffs,
                       const Vec& values = Vec());

/// Non-causality test: coefficients of the cause series at the given lags
/// (1-based) are jointly zero.
WaldResult wald_causality(const ProjectionFit& fit, int cause_series, const std::vector<int>& lags);

CiResult z_interval(const ProjectionFit& fit, int coeff, double level);

/// Simulated p-value (1 + #{draws >= observed}) / (N + 1); ties count as
/// exceedances.
double mc_pvalue(double observed, const std::vector<double>& draws);

struct BootstrapRun {
  Mat pivots;   // kept draws x |w_list|
  Vec point;    // w'beta_hat per w
  Vec se;       // sqrt(w' cov w / t_bar) per w
  int failures = 0;
  int draws = 0;
  bool degenerate = false;  // all-zero residuals: intervals collapse to the point
};

/// Wild bootstrap pivot draws (fit, bias-corrected VAR, RC-VAR center,
/// studentized pivots per draw). Requires a two-stage estimator spec.
BootstrapRun wild_bootstrap_pivots(const SeriesPanel& panel, const EstimatorSpec& spec, int h,
                                   const std::vector<Vec>& w_list, int B, const RngStream& rng,
                                   int threads = 1);

/// Equal-tailed percentile-t interval for w'beta.
CiResult bootstrap_ti(const SeriesPanel& panel, const EstimatorSpec& spec, int h, const Vec& w,
                      int B, double level, const RngStream& rng, int threads = 1);

/// Simultaneous band: one critical value from the level-quantile of
/// max_j |pivot_bj|.
std::vector<CiResult> supt_band(const Mat& pivots, const Vec& point, const Vec& se, double level);

struct PointRestriction {
  int coeff = 0;
  double value = 0.0;
};

struct McTestResult {
  double p_value = 1.0;
  double statistic = 0.0;
  std::vector<double> draws;
  std::vector<double> argmax;  // MMC: nuisance point attaining the maximum
  int failures = 0;
};

/// Local Monte Carlo test of H0: beta_S = values, simulating from the fitted
/// VAR with Gaussian residuals and the restricted projection coefficients.
McTestResult lmc_test(const SeriesPanel& panel, const std::vector<PointRestriction>& restriction,
                      const EstimatorSpec& spec, int h, int N, const RngStream& rng,
                      int threads = 1);

struct NuisanceBox {
  double half_width_se = 2.0;  // box half-width in standard errors
  int grid_points = 3;         // per free coefficient
};

/// Maximized Monte Carlo test: LMC p-value maximized over a factorial grid of
/// the free coefficients (restricted ones stay fixed by the null). Draws are
/// shared across grid points, so p_MMC >= p_LMC for the same seed.
McTestResult mmc_test(const SeriesPanel& panel, const std::vector<PointRestriction>& restriction,
                      const EstimatorSpec& spec, int h, const NuisanceBox& box, int N,
                      const RngStream& rng, int threads = 1);

struct InversionCi {
  CiResult ci;
  bool contiguous = true;
  std::vector<double> grid;
  std::vector<double> p_values;
};

/// Confidence interval by inverting point-null LMC (or MMC) tests over a grid.
InversionCi ci_by_test_inversion(const SeriesPanel& panel, int coeff, double lo, double hi,
                                 int grid_points, bool use_mmc, const EstimatorSpec& spec, int h,
                                 double level, int N, const RngStream& rng, int threads = 1,
                                 const NuisanceBox& box = NuisanceBox());

}  // namespace gir
