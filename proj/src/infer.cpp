#include "gir/infer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "gir/model.hpp"
#include "gir/parallel.hpp"
#include "gir/simulate.hpp"
#include "gir/stats.hpp"

namespace gir {

ProjectionFit fit_with_spec(const SeriesPanel& panel, const EstimatorSpec& spec, int h,
                            const Mat* provided_u) {
  switch (spec.method) {
    case FitMethod::ls_proj:
      return ls_projection(panel, spec.p, h, spec.target_row, spec.intercept, spec.hac_bandwidth);
    case FitMethod::rc_var: {
      VarFit vf = fit_var_ls(panel, spec.p, spec.intercept);
      return rc_var_gir(vf, h, spec.target_row);
    }
    case FitMethod::two_stage:
      return two_stage(panel, spec.p, h, spec.delta, spec.target_row, spec.intercept, nullptr);
    case FitMethod::two_stage_infeasible:
      if (!provided_u) fail(ErrorCode::invalid_spec, "infeasible estimator needs true innovations");
      return two_stage(panel, spec.p, h, spec.delta, spec.target_row, spec.intercept, provided_u);
  }
  fail(ErrorCode::invalid_spec, "unknown estimator");
}

WaldResult wald_subset(const ProjectionFit& fit, const std::vector<int>& coeffs, const Vec& values) {
  if (coeffs.empty()) fail(ErrorCode::invalid_restriction, "empty coefficient subset");
  if (values.size() != 0 && values.size() != static_cast<int>(coeffs.size())) {
    fail(ErrorCode::invalid_restriction, "restriction values do not match the subset size");
  }
  const int m = static_cast<int>(coeffs.size());
  Vec diff(m);
  Mat sub(m, m);
  for (int i = 0; i < m; ++i) {
    int ci = coeffs[i];
    if (ci < 0 || ci >= fit.beta.size()) fail(ErrorCode::invalid_restriction, "coefficient index out of range");
    diff(i) = fit.beta(ci) - (values.size() ? values(i) : 0.0);
    for (int j = 0; j < m; ++j) sub(i, j) = fit.cov(ci, coeffs[j]);
  }
  Vec x = solve_guarded(sub, diff, ErrorCode::singular_moment, "Wald covariance sub-block");
  WaldResult out;
  out.statistic = std::max(0.0, static_cast<double>(fit.t_bar) * diff.dot(x));
  out.df = m;
  out.p_value = chi2_sf(out.statistic, m);
  return out;
}

WaldResult wald_causality(const ProjectionFit& fit, int cause_series, const std::vector<int>& lags) {
  if (lags.empty()) fail(ErrorCode::invalid_restriction, "no lags selected");
  if (cause_series < 0 || cause_series >= fit.k) {
    fail(ErrorCode::invalid_restriction, "cause series out of range");
  }
  std::vector<int> idx;
  for (int lag : lags) {
    if (lag < 1 || lag > fit.p) fail(ErrorCode::invalid_restriction, "lag outside 1..p");
    idx.push_back((lag - 1) * fit.k + cause_series);
  }
  WaldResult out = wald_subset(fit, idx);
  std::ostringstream os;
  os << "series " << cause_series + 1 << " -> equation " << fit.target_row + 1 << " at horizon "
     << fit.h << ", lags";
  for (int lag : lags) os << ' ' << lag;
  out.restriction = os.str();
  return out;
}

CiResult z_interval(const ProjectionFit& fit, int coeff, double level) {
  if (!(level >= 0.0 && level < 1.0)) fail(ErrorCode::invalid_spec, "level must be in [0,1)");
  double s = fit.se(coeff);
  if (!(s >= 0.0)) fail(ErrorCode::invalid_covariance, "nonpositive variance entry");
  double z = level == 0.0 ? 0.0 : normal_quantile(0.5 * (1.0 + level));
  CiResult ci;
  ci.lower = fit.beta(coeff) - z * s;
  ci.upper = fit.beta(coeff) + z * s;
  ci.level = level;
  ci.method = CiMethod::z;
  return ci;
}

double mc_pvalue(double observed, const std::vector<double>& draws) {
  if (draws.empty()) fail(ErrorCode::invalid_spec, "mc_pvalue needs at least one draw");
  std::size_t exceed = 0;
  for (double d : draws) {
    if (d - observed >= 0.0) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(draws.size() + 1);
}

namespace {

double studentized(const Vec& w, const Vec& beta, const Mat& cov, int t_bar, const Vec& center) {
  double var = w.dot(cov * w) / t_bar;
  double num = w.dot(beta - center);
  if (var <= 0.0) {
    if (num == 0.0) return 0.0;
    fail(ErrorCode::invalid_covariance, "zero pivot variance with nonzero numerator");
  }
  return num / std::sqrt(var);
}

}  // namespace

BootstrapRun wild_bootstrap_pivots(const SeriesPanel& panel, const EstimatorSpec& spec, int h,
                                   const std::vector<Vec>& w_list, int B, const RngStream& rng,
                                   int threads) {
  if (B < 100) fail(ErrorCode::invalid_spec, "bootstrap needs B >= 100");
  if (w_list.empty()) fail(ErrorCode::invalid_spec, "no selection vectors");
  if (spec.method != FitMethod::two_stage) {
    fail(ErrorCode::invalid_spec, "bootstrap pivots are defined for the two-stage estimator");
  }
  panel.validate();
  const int T = panel.T(), k = panel.k(), p = spec.p;
  const int m = static_cast<int>(w_list.size());

  VarFit vf = fit_var_ls(panel, p, spec.intercept);
  ProjectionFit point_fit = two_stage_with_fit(panel, vf, h, spec.delta, spec.target_row, spec.intercept);

  BootstrapRun run;
  run.point.resize(m);
  run.se.resize(m);
  for (int j = 0; j < m; ++j) {
    run.point(j) = w_list[j].dot(point_fit.beta);
    run.se(j) = std::sqrt(std::max(0.0, w_list[j].dot(point_fit.cov * w_list[j])) / point_fit.t_bar);
  }

  double resid_scale = vf.residuals.cwiseAbs().maxCoeff();
  if (resid_scale < 1e-12 * std::max(1.0, panel.data.cwiseAbs().maxCoeff())) {
    run.degenerate = true;
    run.pivots = Mat::Zero(0, m);
    return run;
  }

  VarFit gen = spec.bias_correct ? pope_bias_correct(vf) : vf;
  ProjectionFit rc = rc_var_gir(gen, h, spec.target_row);
  Vec center = spec.center_on_two_stage ? point_fit.beta : rc.beta;

  Mat pivots(B, m);
  std::vector<char> ok(B, 0);
  const Mat& resid = gen.residuals;
  const int n_resid = static_cast<int>(resid.rows());

  parallel_for(B, threads, [&](std::int64_t b) {
    RngStream draw_rng = rng.substream(static_cast<std::uint64_t>(b));
    try {
      // Initial block, then one wild factor per residual row.
      std::int64_t start = draw_rng.uniform_int(0, T - p);
      Mat ystar(T, k);
      ystar.topRows(p) = panel.data.middleRows(start, p);
      for (int t = p; t < T; ++t) {
        Vec acc = draw_rng.normal() * resid.row(t - p).transpose();
        if (gen.intercept) acc += gen.params_hat.intercept;
        for (int i = 0; i < p; ++i) acc += gen.params_hat.phi[i] * ystar.row(t - 1 - i).transpose();
        ystar.row(t) = acc.transpose();
      }
      SeriesPanel bp;
      bp.data = std::move(ystar);
      bp.origin = SeriesPanel::Origin::simulated;
      ProjectionFit bf = two_stage(bp, p, h, spec.delta, spec.target_row, spec.intercept);
      for (int j = 0; j < m; ++j) {
        pivots(b, j) = studentized(w_list[j], bf.beta, bf.cov, bf.t_bar, center);
      }
      ok[b] = 1;
    } catch (const Error&) {
      ok[b] = 0;
    }
  });
  (void)n_resid;

  int kept = 0;
  for (int b = 0; b < B; ++b) kept += ok[b];
  run.failures = B - kept;
  run.draws = B;
  if (run.failures * 10 > B) {
    fail(ErrorCode::unstable_bootstrap,
         std::to_string(run.failures) + " of " + std::to_string(B) + " bootstrap draws failed");
  }
  run.pivots.resize(kept, m);
  int r = 0;
  for (int b = 0; b < B; ++b) {
    if (ok[b]) run.pivots.row(r++) = pivots.row(b);
  }
  return run;
}

CiResult bootstrap_ti(const SeriesPanel& panel, const EstimatorSpec& spec, int h, const Vec& w,
                      int B, double level, const RngStream& rng, int threads) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::invalid_spec, "level must be in (0,1)");
  BootstrapRun run = wild_bootstrap_pivots(panel, spec, h, {w}, B, rng, threads);
  CiResult ci;
  ci.level = level;
  ci.method = CiMethod::bootstrap_t;
  if (run.degenerate) {
    // All-zero residuals: the projection is exact and the interval collapses.
    ProjectionFit exact = ls_projection(panel, spec.p, h, spec.target_row, spec.intercept, 0);
    double pt = w.dot(exact.beta);
    ci.lower = ci.upper = pt;
    return ci;
  }
  std::vector<double> pv(run.pivots.rows());
  for (int i = 0; i < run.pivots.rows(); ++i) pv[i] = run.pivots(i, 0);
  double alpha = 1.0 - level;
  double q_lo = quantile_type7(pv, 0.5 * alpha);
  double q_hi = quantile_type7(pv, 1.0 - 0.5 * alpha);
  ci.lower = run.point(0) - q_hi * run.se(0);
  ci.upper = run.point(0) - q_lo * run.se(0);
  return ci;
}

std::vector<CiResult> supt_band(const Mat& pivots, const Vec& point, const Vec& se, double level) {
  const int B = static_cast<int>(pivots.rows());
  const int m = static_cast<int>(pivots.cols());
  if (B < 100) fail(ErrorCode::invalid_spec, "sup-t band needs at least 100 draws");
  if (m < 1 || point.size() != m || se.size() != m) fail(ErrorCode::invalid_spec, "band inputs misaligned");
  std::vector<double> maxabs(B);
  for (int b = 0; b < B; ++b) maxabs[b] = pivots.row(b).cwiseAbs().maxCoeff();
  double c = quantile_type7(maxabs, level);
  std::vector<CiResult> out(m);
  for (int j = 0; j < m; ++j) {
    out[j].lower = point(j) - c * se(j);
    out[j].upper = point(j) + c * se(j);
    out[j].level = level;
    out[j].method = CiMethod::supt;
  }
  return out;
}

namespace {

struct LmcContext {
  VarFit var_fit;
  ProjectionFit data_fit;
  double w0 = 0.0;
  std::vector<int> idx;
  Vec values;
};

LmcContext lmc_prepare(const SeriesPanel& panel, const std::vector<PointRestriction>& restriction,
                       const EstimatorSpec& spec, int h) {
  if (restriction.empty()) fail(ErrorCode::invalid_restriction, "empty restriction");
  LmcContext ctx;
  ctx.var_fit = fit_var_ls(panel, spec.p, spec.intercept);
  ctx.data_fit = two_stage_with_fit(panel, ctx.var_fit, h, spec.delta, spec.target_row, spec.intercept);
  const int pk = static_cast<int>(ctx.data_fit.beta.size());
  ctx.values.resize(restriction.size());
  for (std::size_t i = 0; i < restriction.size(); ++i) {
    if (restriction[i].coeff < 0 || restriction[i].coeff >= pk) {
      fail(ErrorCode::invalid_restriction, "restricted coefficient out of range");
    }
    ctx.idx.push_back(restriction[i].coeff);
    ctx.values(i) = restriction[i].value;
  }
  ctx.w0 = wald_subset(ctx.data_fit, ctx.idx, ctx.values).statistic;
  return ctx;
}

/// One pass of simulated Wald statistics under the restricted coefficient
/// vector beta0. Draw n reuses substream n, so different beta0 values share
/// the same simulated innovations.
std::vector<double> lmc_draws(const LmcContext& ctx, const SeriesPanel& panel,
                              const EstimatorSpec& spec, int h, const Vec& beta0, int N,
                              const RngStream& rng, int threads, int* failures) {
  const int T = panel.T(), k = panel.k(), p = spec.p;
  const VarParams& ph = ctx.var_fit.params_hat;
  std::vector<double> draws(N, std::numeric_limits<double>::infinity());
  std::atomic<int> failed{0};
  parallel_for(N, threads, [&](std::int64_t n) {
    RngStream draw_rng = rng.substream(static_cast<std::uint64_t>(n));
    try {
      Mat ustar = mc_gaussian_residuals(ph.sigma_u, T, draw_rng);
      // Panel from the fitted (unrestricted) VAR, zero initial conditions.
      Mat ystar = Mat::Zero(T, k);
      for (int t = 0; t < T; ++t) {
        Vec acc = ustar.row(t).transpose();
        if (ctx.var_fit.intercept) acc += ph.intercept;
        for (int i = 0; i < p; ++i) {
          if (t - 1 - i >= 0) acc += ph.phi[i] * ystar.row(t - 1 - i).transpose();
        }
        ystar.row(t) = acc.transpose();
      }
      SeriesPanel sp;
      sp.data = ystar;
      sp.origin = SeriesPanel::Origin::simulated;
      // Projection residuals from the moving-average form, then the response
      // under the restricted coefficients.
      VarParams irf_params = ph;
      Vec estar = projection_residuals_from_irf(ustar, irf_params, h, spec.target_row);
      const int q0 = p - 1;
      Vec response(estar.size());
      for (int i = 0; i < estar.size(); ++i) {
        int s = q0 + i;
        double val = ctx.data_fit.intercept_hat + estar(i);
        for (int lag = 0; lag < p; ++lag) {
          val += beta0.segment(lag * k, k).dot(ystar.row(s - lag));
        }
        response(i) = val;
      }
      VarFit vf = fit_var_ls(sp, p, spec.intercept);
      ProjectionFit pf = two_stage_with_fit(sp, vf, h, spec.delta, spec.target_row, spec.intercept,
                                            nullptr, &response, q0);
      draws[n] = wald_subset(pf, ctx.idx, ctx.values).statistic;
    } catch (const Error&) {
      // Failed draws count as exceedances, which can only raise the p-value.
      failed.fetch_add(1);
    }
  });
  if (failures) *failures = failed.load();
  return draws;
}

Vec restricted_beta(const LmcContext& ctx, const Vec& free_values, const std::vector<int>& free_idx) {
  Vec beta0 = ctx.data_fit.beta;
  for (std::size_t i = 0; i < ctx.idx.size(); ++i) beta0(ctx.idx[i]) = ctx.values(i);
  for (std::size_t i = 0; i < free_idx.size(); ++i) beta0(free_idx[i]) = free_values(i);
  return beta0;
}

}  // namespace

McTestResult lmc_test(const SeriesPanel& panel, const std::vector<PointRestriction>& restriction,
                      const EstimatorSpec& spec, int h, int N, const RngStream& rng, int threads) {
  if (N < 19) fail(ErrorCode::invalid_spec, "LMC needs N >= 19 for level 0.05");
  LmcContext ctx = lmc_prepare(panel, restriction, spec, h);
  Vec beta0 = restricted_beta(ctx, Vec(), {});
  McTestResult out;
  out.statistic = ctx.w0;
  out.draws = lmc_draws(ctx, panel, spec, h, beta0, N, rng, threads, &out.failures);
  out.p_value = mc_pvalue(ctx.w0, out.draws);
  return out;
}

McTestResult mmc_test(const SeriesPanel& panel, const std::vector<PointRestriction>& restriction,
                      const EstimatorSpec& spec, int h, const NuisanceBox& box, int N,
                      const RngStream& rng, int threads) {
  if (N < 19) fail(ErrorCode::invalid_spec, "MMC needs N >= 19 for level 0.05");
  if (box.grid_points < 1) fail(ErrorCode::invalid_spec, "nuisance grid must have at least one point");
  if (!std::isfinite(box.half_width_se)) fail(ErrorCode::invalid_spec, "nuisance box must be finite");
  LmcContext ctx = lmc_prepare(panel, restriction, spec, h);
  const int pk = static_cast<int>(ctx.data_fit.beta.size());
  std::vector<int> free_idx;
  for (int j = 0; j < pk; ++j) {
    if (std::find(ctx.idx.begin(), ctx.idx.end(), j) == ctx.idx.end()) free_idx.push_back(j);
  }
  const int nf = static_cast<int>(free_idx.size());

  McTestResult best;
  best.statistic = ctx.w0;
  auto evaluate = [&](const Vec& free_values) {
    Vec beta0 = restricted_beta(ctx, free_values, free_idx);
    int failures = 0;
    std::vector<double> draws = lmc_draws(ctx, panel, spec, h, beta0, N, rng, threads, &failures);
    double pv = mc_pvalue(ctx.w0, draws);
    if (pv > best.p_value || best.draws.empty()) {
      best.p_value = pv;
      best.draws = std::move(draws);
      best.failures = failures;
      best.argmax.assign(beta0.data(), beta0.data() + beta0.size());
    }
  };

  // Center point first (the LMC point), then the factorial grid around it.
  Vec center(nf);
  for (int i = 0; i < nf; ++i) center(i) = ctx.data_fit.beta(free_idx[i]);
  best.p_value = -1.0;
  evaluate(center);
  if (nf > 0 && box.grid_points > 1) {
    std::vector<double> half(nf);
    for (int i = 0; i < nf; ++i) half[i] = box.half_width_se * ctx.data_fit.se(free_idx[i]);
    std::vector<int> pos(nf, 0);
    const int g = box.grid_points;
    std::int64_t total = 1;
    for (int i = 0; i < nf; ++i) {
      total *= g;
      if (total > 100000) fail(ErrorCode::invalid_spec, "nuisance grid too large");
    }
    for (std::int64_t cell = 0; cell < total; ++cell) {
      std::int64_t rem = cell;
      Vec point(nf);
      for (int i = 0; i < nf; ++i) {
        int gi = static_cast<int>(rem % g);
        rem /= g;
        double frac = g == 1 ? 0.5 : static_cast<double>(gi) / (g - 1);
        point(i) = center(i) - half[i] + 2.0 * half[i] * frac;
      }
      evaluate(point);
    }
  }
  return best;
}

InversionCi ci_by_test_inversion(const SeriesPanel& panel, int coeff, double lo, double hi,
                                 int grid_points, bool use_mmc, const EstimatorSpec& spec, int h,
                                 double level, int N, const RngStream& rng, int threads,
                                 const NuisanceBox& box) {
  if (grid_points < 1) fail(ErrorCode::invalid_spec, "grid needs at least one point");
  if (!(hi >= lo)) fail(ErrorCode::invalid_spec, "grid bounds reversed");
  ProjectionFit fit = two_stage(panel, spec.p, h, spec.delta, spec.target_row, spec.intercept);
  if (coeff < 0 || coeff >= fit.beta.size()) fail(ErrorCode::invalid_spec, "coefficient index out of range");
  double point = fit.beta(coeff);
  if (point < lo || point > hi) {
    fail(ErrorCode::invalid_spec, "grid bounds must bracket the point estimate " + std::to_string(point));
  }
  double alpha = 1.0 - level;
  InversionCi out;
  for (int i = 0; i < grid_points; ++i) {
    double v = grid_points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
    std::vector<PointRestriction> r = {{coeff, v}};
    McTestResult t = use_mmc ? mmc_test(panel, r, spec, h, box, N, rng, threads)
                             : lmc_test(panel, r, spec, h, N, rng, threads);
    out.grid.push_back(v);
    out.p_values.push_back(t.p_value);
  }
  double best_lo = 0.0, best_hi = 0.0;
  bool any = false;
  int first_acc = -1, last_acc = -1;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    if (out.p_values[i] >= alpha) {
      if (!any) {
        best_lo = out.grid[i];
        first_acc = static_cast<int>(i);
        any = true;
      }
      best_hi = out.grid[i];
      last_acc = static_cast<int>(i);
    }
  }
  if (!any) {
    fail(ErrorCode::empty_inversion, "no grid point accepted; widen the bounds or refine the grid");
  }
  out.contiguous = true;
  for (int i = first_acc; i <= last_acc; ++i) {
    if (out.p_values[i] < alpha) out.contiguous = false;
  }
  out.ci.lower = best_lo;
  out.ci.upper = best_hi;
  out.ci.level = level;
  out.ci.method = use_mmc ? CiMethod::mmc_inversion : CiMethod::lmc_inversion;
  return out;
}

}  // namespace gir
