#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gir/infer.hpp"
#include "gir/model.hpp"
#include "gir/simulate.hpp"
#include "gir/stats.hpp"

using namespace gir;

namespace {

ProjectionFit synthetic_fit(const Vec& beta, const Mat& cov, int t_bar, int p, int k) {
  ProjectionFit fit;
  fit.method = FitMethod::two_stage;
  fit.beta = beta;
  fit.cov = cov;
  fit.t_bar = t_bar;
  fit.p = p;
  fit.k = k;
  fit.h = 1;
  return fit;
}

VarParams white_noise(int k) {
  VarParams wn;
  wn.k = k;
  wn.p = 1;
  wn.phi = {Mat::Zero(k, k)};
  wn.sigma_u = Mat::Identity(k, k);
  return wn;
}

}  // namespace

TEST_CASE("scalar statistics") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(chi2_sf(45.281, 12) == doctest::Approx(9.22e-6).epsilon(1e-3));
  CHECK(chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi2_sf(21.02606981748307, 12) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi2_sf(0.0, 5) == 1.0);
  std::vector<double> v;
  for (int i = 1; i <= 2000; ++i) v.push_back(i);
  CHECK(quantile_type7(v, 0.025) == doctest::Approx(1.0 + 0.025 * 1999.0).epsilon(1e-12));
  CHECK(quantile_type7(v, 0.975) == doctest::Approx(1.0 + 0.975 * 1999.0).epsilon(1e-12));
  CHECK(quantile_type7({5.0}, 0.3) == 5.0);
}

TEST_CASE("wald tests") {
  SUBCASE("zero restriction gives zero statistic and unit p") {
    Vec beta = Vec::Zero(4);
    Mat cov = Mat::Identity(4, 4);
    ProjectionFit fit = synthetic_fit(beta, cov, 100, 2, 2);
    WaldResult w = wald_causality(fit, 1, {1, 2});
    CHECK(w.statistic == 0.0);
    CHECK(w.p_value == 1.0);
    CHECK(w.df == 2);
  }
  SUBCASE("single coefficient equals the squared z statistic") {
    Vec beta(4);
    beta << 0.3, -0.2, 0.1, 0.05;
    Mat cov = Mat::Identity(4, 4) * 2.0;
    ProjectionFit fit = synthetic_fit(beta, cov, 50, 2, 2);
    WaldResult w = wald_subset(fit, {1});
    double z = beta(1) / fit.se(1);
    CHECK(w.statistic == doctest::Approx(z * z).epsilon(1e-12));
    CHECK(w.df == 1);
  }
  SUBCASE("lag selection maps to lag-major coefficient indices") {
    Vec beta(4);
    beta << 1.0, 2.0, 3.0, 4.0;
    Mat cov = Mat::Identity(4, 4);
    ProjectionFit fit = synthetic_fit(beta, cov, 10, 2, 2);
    WaldResult w = wald_causality(fit, 1, {2});  // series 2 at lag 2 -> index 3
    CHECK(w.statistic == doctest::Approx(10.0 * 16.0).epsilon(1e-12));
  }
  SUBCASE("singular sub-block errors") {
    Vec beta(2);
    beta << 0.1, 0.2;
    Mat cov = Mat::Ones(2, 2);
    ProjectionFit fit = synthetic_fit(beta, cov, 10, 2, 1);
    CHECK_THROWS_AS(wald_subset(fit, {0, 1}), Error);
  }
}

TEST_CASE("z intervals") {
  SUBCASE("normal quantile arithmetic") {
    Vec beta(1);
    beta << 0.7;
    Mat cov = Mat::Identity(1, 1) * 25.0;  // se = sqrt(25/25) = 1
    ProjectionFit fit = synthetic_fit(beta, cov, 25, 1, 1);
    CiResult ci = z_interval(fit, 0, 0.95);
    CHECK(ci.lower == doctest::Approx(0.7 - 1.959964).epsilon(1e-6));
    CHECK(ci.upper == doctest::Approx(0.7 + 1.959964).epsilon(1e-6));
    CiResult point = z_interval(fit, 0, 0.0);
    CHECK(point.lower == point.upper);
    CHECK(point.lower == 0.7);
  }
  SUBCASE("nonpositive variance errors") {
    Vec beta(1);
    beta << 0.7;
    Mat cov = Mat::Constant(1, 1, -1.0);
    ProjectionFit fit = synthetic_fit(beta, cov, 25, 1, 1);
    CHECK_THROWS_AS(z_interval(fit, 0, 0.95), Error);
  }
  SUBCASE("coverage under a white-noise truth") {
    VarParams wn = white_noise(2);
    wn.sigma_u(0, 1) = wn.sigma_u(1, 0) = 0.5;
    const int reps = 1000, T = 250, h = 3;
    int covered = 0;
    for (int r = 0; r < reps; ++r) {
      RngStream rng(31337, r);
      SeriesPanel panel = simulate_var(wn, T, InnovationSpec{}, rng);
      ProjectionFit fit = two_stage(panel, 1, h, 0, 0, true);
      CiResult ci = z_interval(fit, 1, 0.95);
      if (ci.lower <= 0.0 && 0.0 <= ci.upper) ++covered;
    }
    double cov = static_cast<double>(covered) / reps;
    CHECK(cov > 0.93);
    CHECK(cov < 0.97);
  }
}

TEST_CASE("mc_pvalue lattice") {
  std::vector<double> draws(99, 0.0);
  CHECK(mc_pvalue(1.0, draws) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(mc_pvalue(-1.0, draws) == 1.0);  // ties count as exceedances
  std::vector<double> d19(19, 0.0);
  for (int i = 0; i < 4; ++i) d19[i] = 2.0;
  CHECK(mc_pvalue(1.0, d19) == doctest::Approx(0.25).epsilon(1e-14));
  RngStream rng(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 19 + static_cast<int>(rng.uniform_int(0, 80));
    std::vector<double> dd(n);
    for (double& x : dd) x = rng.normal();
    double p = mc_pvalue(rng.normal(), dd);
    double grid = p * (n + 1);
    CHECK(std::fabs(grid - std::round(grid)) < 1e-9);
    CHECK(p >= 1.0 / (n + 1));
    CHECK(p <= 1.0);
  }
}

TEST_CASE("wild bootstrap percentile-t") {
  SUBCASE("degenerate residuals collapse the interval") {
    Mat a(2, 2), b(2, 2);
    a << 0.5, 0.1, 0.0, 0.4;
    b << -0.1, 0.05, 0.02, -0.2;
    const int T = 60;
    Mat y = Mat::Zero(T, 2);
    y.row(0) << 1.0, -0.4;
    y.row(1) << 0.2, 0.9;
    for (int t = 2; t < T; ++t) {
      y.row(t) = (a * y.row(t - 1).transpose() + b * y.row(t - 2).transpose()).transpose();
    }
    SeriesPanel panel;
    panel.data = y;
    EstimatorSpec spec;
    spec.p = 2;
    spec.intercept = false;
    Vec w = Vec::Zero(4);
    w(1) = 1.0;
    RngStream rng(1, 0);
    CiResult ci = bootstrap_ti(panel, spec, 2, w, 200, 0.95, rng, 1);
    CHECK(ci.lower == ci.upper);
  }
  SUBCASE("quantile arithmetic reproduces the z interval on Gaussian pivots") {
    RngStream rng(9, 0);
    std::vector<double> pivots(100000);
    for (double& x : pivots) x = rng.normal();
    CHECK(std::fabs(quantile_type7(pivots, 0.975) - 1.959964) < 3.0 * 0.009);
    CHECK(std::fabs(quantile_type7(pivots, 0.025) + 1.959964) < 3.0 * 0.009);
  }
  SUBCASE("runs on simulated data and brackets the point estimate") {
    VarParams truth = white_noise(2);
    RngStream sim(77, 0);
    SeriesPanel panel = simulate_var(truth, 150, InnovationSpec{}, sim);
    EstimatorSpec spec;
    spec.p = 1;
    Vec w = Vec::Zero(2);
    w(1) = 1.0;
    RngStream rng(78, 0);
    CiResult ci = bootstrap_ti(panel, spec, 2, w, 150, 0.9, rng, 1);
    CHECK(ci.lower < ci.upper);
    ProjectionFit fit = two_stage(panel, 1, 2, 0, 0, true);
    CHECK(ci.lower < fit.beta(1));
    CHECK(fit.beta(1) < ci.upper);
  }
  SUBCASE("identical across worker counts") {
    VarParams truth = white_noise(2);
    RngStream sim(79, 0);
    SeriesPanel panel = simulate_var(truth, 150, InnovationSpec{}, sim);
    EstimatorSpec spec;
    spec.p = 1;
    Vec w = Vec::Zero(2);
    w(0) = 1.0;
    CiResult a = bootstrap_ti(panel, spec, 2, w, 120, 0.95, RngStream(80, 0), 1);
    CiResult b = bootstrap_ti(panel, spec, 2, w, 120, 0.95, RngStream(80, 0), 4);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
  }
}

TEST_CASE("sup-t bands") {
  RngStream rng(21, 0);
  SUBCASE("single column matches the symmetrized percentile critical value") {
    const int B = 5000;
    Mat pivots(B, 1);
    std::vector<double> absd(B);
    for (int i = 0; i < B; ++i) {
      pivots(i, 0) = rng.normal();
      absd[i] = std::fabs(pivots(i, 0));
    }
    Vec point(1), se(1);
    point << 1.0;
    se << 0.5;
    auto band = supt_band(pivots, point, se, 0.95);
    double c = quantile_type7(absd, 0.95);
    CHECK(band[0].lower == doctest::Approx(1.0 - c * 0.5).epsilon(1e-12));
    CHECK(band[0].upper == doctest::Approx(1.0 + c * 0.5).epsilon(1e-12));
  }
  SUBCASE("duplicated columns add no width") {
    const int B = 2000;
    Mat pivots(B, 2);
    for (int i = 0; i < B; ++i) {
      double z = rng.normal();
      pivots(i, 0) = z;
      pivots(i, 1) = z;
    }
    Vec point = Vec::Zero(2), se = Vec::Ones(2);
    auto band = supt_band(pivots, point, se, 0.9);
    auto single = supt_band(pivots.leftCols(1), point.head(1), se.head(1), 0.9);
    CHECK(band[0].upper == doctest::Approx(single[0].upper).epsilon(1e-12));
    CHECK(band[1].upper == doctest::Approx(single[0].upper).epsilon(1e-12));
  }
  SUBCASE("independent columns recover the exact max-|Z| quantile") {
    const int B = 100000;
    Mat pivots(B, 2);
    for (int i = 0; i < B; ++i) {
      pivots(i, 0) = rng.normal();
      pivots(i, 1) = rng.normal();
    }
    Vec point = Vec::Zero(2), se = Vec::Ones(2);
    auto band = supt_band(pivots, point, se, 0.95);
    double c = band[0].upper;
    // Oracle: P(max(|Z1|,|Z2|) <= c) = (2 Phi(c) - 1)^2 = 0.95.
    double oracle = normal_quantile(0.5 * (1.0 + std::sqrt(0.95)));
    CHECK(oracle > 1.959964);
    CHECK(oracle < 2.241403);  // strictly inside the Bonferroni bound
    CHECK(std::fabs(c - oracle) < 3.0 * 0.006);
  }
  SUBCASE("sup-t critical value dominates the pointwise one") {
    const int B = 3000, m = 3;
    Mat pivots(B, m);
    for (int i = 0; i < B; ++i)
      for (int j = 0; j < m; ++j) pivots(i, j) = rng.normal() + 0.2 * rng.normal();
    Vec point = Vec::Zero(m), se = Vec::Ones(m);
    auto band = supt_band(pivots, point, se, 0.95);
    for (int j = 0; j < m; ++j) {
      std::vector<double> absd(B);
      for (int i = 0; i < B; ++i) absd[i] = std::fabs(pivots(i, j));
      double cj = quantile_type7(absd, 0.95);
      CHECK(band[j].upper >= cj - 1e-12);
    }
  }
}

TEST_CASE("local Monte Carlo test") {
  EstimatorSpec spec;
  spec.p = 1;
  SUBCASE("restriction at the point estimate cannot reject") {
    VarParams truth = white_noise(1);
    RngStream sim(100, 0);
    SeriesPanel panel = simulate_var(truth, 120, InnovationSpec{}, sim);
    ProjectionFit fit = two_stage(panel, 1, 2, 0, 0, true);
    std::vector<PointRestriction> r = {{0, fit.beta(0)}};
    McTestResult t = lmc_test(panel, r, spec, 2, 99, RngStream(101, 0), 1);
    CHECK(t.statistic == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(t.p_value == 1.0);
  }
  SUBCASE("size under the true null") {
    VarParams truth = white_noise(1);
    const int reps = 400, N = 99, T = 100;
    int rejected = 0;
    for (int r = 0; r < reps; ++r) {
      RngStream sim(200, r);
      SeriesPanel panel = simulate_var(truth, T, InnovationSpec{}, sim);
      std::vector<PointRestriction> rest = {{0, 0.0}};
      McTestResult t = lmc_test(panel, rest, spec, 2, N, RngStream(201, r), 1);
      if (t.p_value <= 0.05) ++rejected;
    }
    double rate = static_cast<double>(rejected) / reps;
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.08);
  }
  SUBCASE("power against a strong violation") {
    VarParams ar = white_noise(1);
    ar.phi[0](0, 0) = 0.8;
    int strong = 0;
    const int seeds = 40;
    for (int r = 0; r < seeds; ++r) {
      RngStream sim(300, r);
      SeriesPanel panel = simulate_var(ar, 500, InnovationSpec{}, sim);
      std::vector<PointRestriction> rest = {{0, 0.0}};
      McTestResult t = lmc_test(panel, rest, spec, 1, 99, RngStream(301, r), 1);
      if (t.p_value <= 0.01) ++strong;
    }
    CHECK(strong >= 38);
  }
  SUBCASE("deterministic across worker counts") {
    VarParams truth = white_noise(1);
    RngStream sim(400, 0);
    SeriesPanel panel = simulate_var(truth, 150, InnovationSpec{}, sim);
    std::vector<PointRestriction> rest = {{0, 0.0}};
    McTestResult a = lmc_test(panel, rest, spec, 2, 59, RngStream(401, 0), 1);
    McTestResult b = lmc_test(panel, rest, spec, 2, 59, RngStream(401, 0), 4);
    CHECK(a.p_value == b.p_value);
    CHECK(a.draws == b.draws);
  }
}

TEST_CASE("maximized Monte Carlo test") {
  EstimatorSpec spec;
  spec.p = 2;
  VarParams ar = white_noise(1);
  ar.p = 2;
  ar.phi = {Mat::Constant(1, 1, 0.3), Mat::Constant(1, 1, 0.1)};
  RngStream sim(500, 0);
  SeriesPanel panel = simulate_var(ar, 200, InnovationSpec{}, sim);
  std::vector<PointRestriction> rest = {{0, 0.3}};
  SUBCASE("single-point box equals the LMC test") {
    NuisanceBox box;
    box.grid_points = 1;
    McTestResult lmc = lmc_test(panel, rest, spec, 2, 59, RngStream(501, 0), 1);
    McTestResult mmc = mmc_test(panel, rest, spec, 2, box, 59, RngStream(501, 0), 1);
    CHECK(mmc.p_value == lmc.p_value);
  }
  SUBCASE("maximized p dominates the LMC p for a shared seed") {
    NuisanceBox box;
    box.grid_points = 3;
    McTestResult lmc = lmc_test(panel, rest, spec, 2, 59, RngStream(502, 0), 1);
    McTestResult mmc = mmc_test(panel, rest, spec, 2, box, 59, RngStream(502, 0), 1);
    CHECK(mmc.p_value >= lmc.p_value);
  }
  SUBCASE("level control under the true null") {
    VarParams wn2 = white_noise(1);
    wn2.p = 2;
    wn2.phi = {Mat::Zero(1, 1), Mat::Zero(1, 1)};
    const int reps = 150;
    int rejected = 0;
    NuisanceBox box;
    box.grid_points = 3;
    EstimatorSpec s2;
    s2.p = 2;
    for (int r = 0; r < reps; ++r) {
      RngStream simr(600, r);
      SeriesPanel pw = simulate_var(wn2, 120, InnovationSpec{}, simr);
      std::vector<PointRestriction> restw = {{0, 0.0}};
      McTestResult t = mmc_test(pw, restw, s2, 2, box, 59, RngStream(601, r), 1);
      if (t.p_value <= 0.05) ++rejected;
    }
    double rate = static_cast<double>(rejected) / reps;
    CHECK(rate <= 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / reps));
  }
}

TEST_CASE("confidence intervals by test inversion") {
  EstimatorSpec spec;
  spec.p = 1;
  SUBCASE("single grid point at the estimate is degenerate") {
    VarParams truth = white_noise(1);
    RngStream sim(700, 0);
    SeriesPanel panel = simulate_var(truth, 150, InnovationSpec{}, sim);
    ProjectionFit fit = two_stage(panel, 1, 2, 0, 0, true);
    InversionCi ci = ci_by_test_inversion(panel, 0, fit.beta(0), fit.beta(0), 1, false, spec, 2,
                                          0.95, 99, RngStream(701, 0), 1);
    CHECK(ci.ci.lower == fit.beta(0));
    CHECK(ci.ci.upper == fit.beta(0));
    CHECK(ci.contiguous);
  }
  SUBCASE("coverage under a white-noise truth") {
    VarParams truth = white_noise(1);
    const int reps = 150;
    int covered = 0;
    for (int r = 0; r < reps; ++r) {
      RngStream sim(800, r);
      SeriesPanel panel = simulate_var(truth, 120, InnovationSpec{}, sim);
      ProjectionFit fit = two_stage(panel, 1, 2, 0, 0, true);
      double half = 5.0 * fit.se(0);
      try {
        InversionCi ci = ci_by_test_inversion(panel, 0, fit.beta(0) - half, fit.beta(0) + half, 17,
                                              false, spec, 2, 0.95, 99, RngStream(801, r), 1);
        if (ci.ci.lower <= 0.0 && 0.0 <= ci.ci.upper) ++covered;
      } catch (const Error&) {
      }
    }
    double rate = static_cast<double>(covered) / reps;
    CHECK(rate >= 0.92);
    CHECK(rate <= 0.995);
  }
  SUBCASE("bounds must bracket the estimate") {
    VarParams truth = white_noise(1);
    RngStream sim(900, 0);
    SeriesPanel panel = simulate_var(truth, 150, InnovationSpec{}, sim);
    ProjectionFit fit = two_stage(panel, 1, 2, 0, 0, true);
    CHECK_THROWS_AS(ci_by_test_inversion(panel, 0, fit.beta(0) + 1.0, fit.beta(0) + 2.0, 5, false,
                                         spec, 2, 0.95, 99, RngStream(901, 0), 1),
                    Error);
  }
}
