#pragma once

#include <Eigen/Dense>
#include <string>

#include "gir/errors.hpp"

namespace gir {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Ratio of extreme singular values; inf when singular.
double condition_number(const Mat& A);

/// Solves A X = B through a pivoted factorization, rejecting condition
/// numbers above max_cond with the given error code.
Mat solve_guarded(const Mat& A, const Mat& B, ErrorCode code, const std::string& context,
                  double max_cond = 1e12);

/// Symmetric (spectral) square root of a PSD matrix. Eigenvalues below
/// -tol * max|eig| raise invalid-covariance; small negatives clamp to zero.
Mat symmetric_sqrt(const Mat& S, double tol = 1e-10);

double spectral_radius(const Mat& A);

/// Discrete Lyapunov solve X = A X A' + Q by doubling; needs spectral radius < 1.
Mat dlyap(const Mat& A, const Mat& Q);

void check_finite(const Mat& M, ErrorCode code, const std::string& context);

}  // namespace gir
