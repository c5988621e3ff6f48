#pragma once

#include <vector>

#include "gir/types.hpp"

namespace gir {

/// Unit-root tolerance for persistence classification.
constexpr double kUnitRootTol = 1e-8;

/// Generalized impulse responses for h = 1..h_max via the recursion
/// Phi_j^{(h+1)} = Phi_{j+1}^{(h)} + Phi_1^{(h)} Phi_j, Phi_j^{(1)} = Phi_j.
std::vector<GirSet> gir_recursion(const VarParams& params, int h_max);

/// Stacked pK x pK companion matrix: top block row holds Phi_1..Phi_p,
/// sub-diagonal identity blocks elsewhere.
Mat companion(const VarParams& params);

/// Sims impulse responses Psi_0..Psi_n (Psi_0 = I).
std::vector<Mat> sims_irf(const VarParams& params, int n);

/// VAR coefficients from the root-matrix factorization:
/// two roots give Phi_1 = Pa + Pb, Phi_2 = -Pa*Pb, similarity-rotated by the
/// spec's rotation matrix when present.
VarParams dgp_from_roots(const DgpSpec& spec);

/// Number of root-matrix eigenvalues with modulus >= 1 - kUnitRootTol, capped at 2.
int persistence_class(const DgpSpec& spec);

/// Autocovariances Gamma_0..Gamma_max_lag, Gamma_m = E[y_t y_{t-m}'].
/// Stationary parameters only; Gamma_{-m} is Gamma_m transposed by the caller.
std::vector<Mat> population_autocov(const VarParams& params, int max_lag);

/// Lead-lag autocovariance of the projection error for the target equation:
/// gamma_e(m) = sum_{i=0}^{h-1-m} Psi_{r.,i} Sigma_u Psi_{r.,i+m}', zero for m >= h.
std::vector<double> projection_error_autocov(const VarParams& params, int h, int target_row = 0);

/// Long-run variance of the reordered score under i.i.d. innovations:
/// block (a,b) = gamma_e(|a-b|) * Sigma_u.
Mat omega_s_closed(const VarParams& params, int h, int target_row = 0);

/// Sigma_zx = (I_p kron Sigma_u) * PsiBar_p', PsiBar_p block upper triangular
/// with blocks Psi_{j-i}.
Mat sigma_zx_closed(const VarParams& params);

/// Asymptotic variance of the two-stage estimates:
/// Omega_beta = Sigma_zx^{-1} Omega_s Sigma_zx'^{-1}.
Mat omega_beta_closed(const VarParams& params, int h, int target_row = 0);

/// LS-projection sandwich with the i.i.d. factorization:
/// (Exx')^{-1} [sum_{|k|<h} E[x_t x_{t+k}'] gamma_e(|k|)] (Exx')^{-1}.
Mat omega_ls_closed(const VarParams& params, int h, int target_row = 0);

}  // namespace gir
