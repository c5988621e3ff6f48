#pragma once

#include <string>
#include <vector>

#include "gir/linalg.hpp"

namespace gir {

/// A VAR(p) model: y_t = c + Phi_1 y_{t-1} + ... + Phi_p y_{t-p} + u_t.
struct VarParams {
  int k = 0;
  int p = 0;
  std::vector<Mat> phi;  // p coefficient matrices, each k x k
  Vec intercept;         // size 0 means no intercept
  Mat sigma_u;           // k x k innovation covariance

  void validate() const;
  bool has_intercept() const { return intercept.size() > 0; }
};

/// Projection coefficients Phi_j^{(h)} for one horizon h. coeffs[0] is the
/// Sims impulse response Psi_h.
struct GirSet {
  int h = 1;
  std::vector<Mat> coeffs;
  const Mat& psi() const { return coeffs.front(); }
};

enum class InnovationLaw { gaussian, scaled_t };

struct InnovationSpec {
  InnovationLaw law = InnovationLaw::gaussian;
  int df = 0;  // scaled_t only
};

/// Simulation recipe: lag polynomial built from 1 or 2 root matrices,
/// optionally rotated, with the innovation law and covariance.
struct DgpSpec {
  std::vector<Mat> roots;  // 1 or 2 k x k root matrices
  Mat rotation;            // empty means identity
  InnovationSpec innovation;
  Mat sigma_u;

  int k() const { return roots.empty() ? 0 : static_cast<int>(roots.front().rows()); }
};

struct SeriesPanel {
  enum class Origin { simulated, loaded };

  Mat data;  // T x k
  std::vector<std::string> names;
  Origin origin = Origin::simulated;

  int T() const { return static_cast<int>(data.rows()); }
  int k() const { return static_cast<int>(data.cols()); }
  void validate() const;
};

/// Closed-form second moments used by the efficiency analysis.
struct PopulationMoments {
  std::vector<Mat> autocov;  // Gamma_0 .. Gamma_L
  Mat sigma_zx;
  Mat omega_s;
  Mat omega_beta;
  Mat omega_ls;
};

}  // namespace gir
