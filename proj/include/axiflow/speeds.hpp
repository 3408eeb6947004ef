#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "axiflow/curvature.hpp"

namespace axiflow {

enum class SpeedKind { MeanPower, Sigma2Power, BlendedQuadratic, UserSupplied };

std::string to_string(SpeedKind kind);
SpeedKind speed_kind_from_string(const std::string& name);

/// A symmetric speed f(lambda_1, ..., lambda_n), homogeneous of degree alpha
/// and scaled so that f(1, ..., 1) = n^alpha.
///
/// Built-in kinds:
///   mean-power        f = c H^alpha
///   sigma2-power      f = c sigma_2^{alpha/2}      (n >= 3 for the cone)
///   blended-quadratic f = c (a H^2 + b |h|^2)^{alpha/2},  a > 0, b >= 0
/// User-supplied speeds give a value callback on the full n-vector; their
/// derivatives are taken by central differences.
class SpeedSpec {
 public:
  using Callback = std::function<double(std::span<const double>)>;

  /// Validates parameters and applies the normalization. With
  /// `enforce_cone` the constructor rejects speeds that are not positive and
  /// strictly monotone on the whole closed cone (sigma2-power with n = 2).
  static SpeedSpec create(SpeedKind kind, int n, double alpha,
                          std::vector<double> coefficients = {},
                          bool enforce_cone = true);
  static SpeedSpec mean_power(int n, double alpha);
  static SpeedSpec sigma2_power(int n, double alpha);
  static SpeedSpec blended_quadratic(int n, double alpha, double a, double b);
  static SpeedSpec user_supplied(int n, double alpha, Callback f, std::string name = "user");

  SpeedKind kind() const { return kind_; }
  int n() const { return n_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double normalizer() const { return normalizer_; }
  /// Positive with positive partials on the closed cone of axially stretched
  /// curvatures.
  bool cone_admissible() const { return cone_admissible_; }
  /// Short identifier, e.g. "mean-power(alpha=2)".
  std::string id() const;

  /// Normalized value on an arbitrary n-vector, no domain checks.
  double value(std::span<const double> lambdas) const;
  /// Normalized value at (lambda, mu, ..., mu), no domain checks.
  double value(const CurvatureVector& k) const;
  /// True when the vector lies in the open cone where the formula is
  /// defined (H > 0, plus sigma_2 >= 0 for sigma2-power).
  bool in_domain(const CurvatureVector& k) const;

 private:
  SpeedSpec() = default;
  double base(std::span<const double> lambdas) const;
  double base(const CurvatureVector& k) const;

  SpeedKind kind_ = SpeedKind::MeanPower;
  int n_ = 2;
  double alpha_ = 1.0;
  std::vector<double> coefficients_;
  double normalizer_ = 1.0;
  bool cone_admissible_ = true;
  std::string name_;
  Callback callback_;
};

/// First and second partials at (lambda, mu, ..., mu). Index 1 is the axial
/// direction, 2 and 3 two distinct radial directions.
struct SpeedDerivatives {
  double f = 0;
  double df1 = 0, df2 = 0;
  double d2f11 = 0, d2f12 = 0, d2f22 = 0, d2f23 = 0;
};

/// f(lambda, mu, ..., mu). Throws DomainError outside the speed's cone and
/// NonPositive if a cone-admissible speed is not positive on the cone.
double evaluate(const SpeedSpec& speed, const CurvatureVector& kappa);

/// Analytic partials for built-in kinds, central differences for
/// user-supplied ones (step 1e-6 |kappa| for first, 1e-4 |kappa| for second).
SpeedDerivatives derivatives(const SpeedSpec& speed, const CurvatureVector& kappa);

/// Same as derivatives() without the domain check; used on the cone boundary.
SpeedDerivatives derivatives_unchecked(const SpeedSpec& speed, const CurvatureVector& kappa);

/// min over unit-norm points of the cone of (f^1 lambda^2 + (n-1) f^2 mu^2) / f^2,
/// sampled at `grid` equally spaced values of lambda/mu in [0, 1].
double tso_constant(const SpeedSpec& speed, int n, int grid);

/// Constants m1 <= f / H^alpha <= m2 on the cone, by grid search over lambda/mu.
struct Comparability {
  double m1 = 0;
  double m2 = 0;
};
Comparability comparability_bounds(const SpeedSpec& speed, int grid);

struct AssumptionReport {
  int samples = 0;
  double symmetry_residual = 0;       ///< max |f(P k) - f(k)| / f(k)
  double min_scaled_value = 0;        ///< min f(k) / |k|^alpha
  double monotonicity_margin = 0;     ///< min(f^1, f^2) / (f / |k|)
  double homogeneity_residual = 0;    ///< max |f(ck) - c^alpha f(k)| / f(ck)
  double normalization_residual = 0;  ///< |f(1..1) - n^alpha| / n^alpha
  bool symmetric = true;
  bool positive = true;
  bool monotone = true;
  bool homogeneous = true;
  bool normalized = true;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

/// Samples the cone (interior and the lambda = 0 face) and checks symmetry,
/// positivity, strict monotonicity, homogeneity and normalization.
AssumptionReport verify_assumptions(const SpeedSpec& speed, int n, int samples,
                                    std::uint64_t seed = 0x5eedULL);

}  // namespace axiflow
