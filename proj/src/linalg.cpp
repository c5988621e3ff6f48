#include "gir/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gir {

double condition_number(const Mat& A) {
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Mat solve_guarded(const Mat& A, const Mat& B, ErrorCode code, const std::string& context,
                  double max_cond) {
  if (A.rows() != A.cols() || A.rows() != B.rows()) {
    fail(ErrorCode::index_contract, context + ": solve dimension mismatch");
  }
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1);
  double cond = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
  if (!(cond < max_cond)) {
    std::ostringstream os;
    os << context << ": condition number " << cond << " exceeds " << max_cond;
    fail(code, os.str());
  }
  return svd.solve(B);
}

Mat symmetric_sqrt(const Mat& S, double tol) {
  if (S.rows() != S.cols()) fail(ErrorCode::invalid_covariance, "square root of non-square matrix");
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + S.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::invalid_covariance, "matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  Vec ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol * scale) {
      fail(ErrorCode::invalid_covariance, "matrix has a negative eigenvalue: " + std::to_string(ev(i)));
    }
    ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double spectral_radius(const Mat& A) {
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

Mat dlyap(const Mat& A, const Mat& Q) {
  double rho = spectral_radius(A);
  if (!(rho < 1.0)) {
    fail(ErrorCode::stationarity_required,
         "Lyapunov solve needs spectral radius < 1, got " + std::to_string(rho));
  }
  Mat X = Q;
  Mat Ak = A;
  for (int it = 0; it < 128; ++it) {
    Mat Xn = X + Ak * X * Ak.transpose();
    double diff = (Xn - X).cwiseAbs().maxCoeff();
    X = Xn;
    if (diff < 1e-15 * std::max(1.0, X.cwiseAbs().maxCoeff())) break;
    Ak = Ak * Ak;
  }
  return X;
}

void check_finite(const Mat& M, ErrorCode code, const std::string& context) {
  if (!M.allFinite()) fail(code, context + ": non-finite entries");
}

}  // namespace gir
