#pragma once

#include <cmath>

namespace axiflow {

/// Principal curvatures (lambda, mu, ..., mu) of a rotationally symmetric
/// hypersurface in R^{n+1}: one axial curvature and n-1 equal radial ones.
template <typename Scalar>
struct CurvatureVectorT {
  int n = 2;
  Scalar lambda = 0;
  Scalar mu = 0;

  Scalar mean() const { return lambda + Scalar(n - 1) * mu; }
  Scalar norm2() const { return lambda * lambda + Scalar(n - 1) * mu * mu; }
  Scalar cubic() const { return lambda * lambda * lambda + Scalar(n - 1) * mu * mu * mu; }
  Scalar sigma2() const {
    return Scalar(n - 1) * lambda * mu + Scalar((n - 1) * (n - 2)) / Scalar(2) * mu * mu;
  }
  /// Euclidean length of the full n-vector.
  Scalar magnitude() const { using std::sqrt; return sqrt(norm2()); }

  CurvatureVectorT scaled(Scalar c) const { return {n, c * lambda, c * mu}; }
};

using CurvatureVector = CurvatureVectorT<double>;

/// Membership in the closed cone {0 <= lambda <= mu, mu > 0}, widened by `tol`.
template <typename Scalar>
bool cone_contains(const CurvatureVectorT<Scalar>& k, Scalar tol = Scalar(0)) {
  return k.mu > tol && k.lambda >= -tol && k.lambda <= k.mu + tol;
}

}  // namespace axiflow
