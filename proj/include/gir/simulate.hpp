#pragma once

#include "gir/rng.hpp"
#include "gir/types.hpp"

namespace gir {

/// Draws T innovation rows with covariance sigma (symmetric square-root
/// factor) under the given law; scaled-t draws are standardized to unit
/// variance first so sigma stays the actual covariance.
Mat draw_innovations(const Mat& sigma, const InnovationSpec& innovation, int T, RngStream& rng);

/// Simulates a VAR path of length T from zero initial conditions (after an
/// optional burn-in that is discarded).
SeriesPanel simulate_var(const VarParams& params, int T, const InnovationSpec& innovation,
                         RngStream& rng, int burn_in = 0);

/// Wild bootstrap: row t of the output is a scalar standard normal times row
/// t of the input.
Mat wild_bootstrap_residuals(const Mat& residuals, RngStream& rng);

/// Uniformly drawn block of p consecutive rows from the panel.
Mat bootstrap_initial_block(const SeriesPanel& panel, int p, RngStream& rng);

/// T i.i.d. Gaussian rows with covariance sigma_hat.
Mat mc_gaussian_residuals(const Mat& sigma_hat, int T, RngStream& rng);

/// Projection residuals built from the moving-average representation:
/// e_{t,h} = target element of sum_{i=0}^{h-1} Psi_i u*_{t+h-i}, for
/// t = p..T-h (1-based), i.e. rows p-1..T-h-1 of u_star.
Vec projection_residuals_from_irf(const Mat& u_star, const VarParams& params, int h,
                                  int target_row = 0);

}  // namespace gir
