#pragma once

#include <Eigen/Dense>

namespace dsm {

// The Hilbert space of the method is modeled as R^n with the Euclidean
// inner product.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline double inner(const Vector& a, const Vector& b) { return a.dot(b); }

/// Spectral (operator 2-) norm.
double spectral_norm(const Matrix& m);

}  // namespace dsm
