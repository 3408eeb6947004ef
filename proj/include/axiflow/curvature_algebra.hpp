#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "axiflow/curvature.hpp"
#include "axiflow/speeds.hpp"

namespace axiflow {

/// Z_sigma = |h|^2 - (1/n + sigma) H^2.
template <typename Scalar>
Scalar z_sigma(const CurvatureVectorT<Scalar>& k, Scalar sigma) {
  const Scalar h = k.mean();
  return k.norm2() - (Scalar(1) / Scalar(k.n) + sigma) * h * h;
}

/// Two routes to |h|^2 - H^2/(n-1): the direct one and the factored form
/// lambda ((n-2)/(n-1) lambda - 2 mu).
template <typename Scalar>
struct PinchIdentity {
  Scalar lhs;
  Scalar rhs;
};

template <typename Scalar>
PinchIdentity<Scalar> pinch_identity(const CurvatureVectorT<Scalar>& k) {
  const Scalar h = k.mean();
  const Scalar nm1 = Scalar(k.n - 1);
  return {k.norm2() - h * h / nm1,
          k.lambda * (Scalar(k.n - 2) / nm1 * k.lambda - Scalar(2) * k.mu)};
}

struct ReactionGap {
  double lhs = 0;     ///< n C - (1 + n sigma) H |h|^2
  double rhs = 0;     ///< sigma (1 + n sigma)(1 - sqrt(n(n-1) sigma)) H^3
  double lambda = 0;  ///< root of Z_sigma(lambda, mu) = 0 in [0, mu]
};

/// Root lambda in [0, mu] of Z_sigma(lambda, mu) = 0. Throws NoRoot.
double z_sigma_root(double mu, double sigma, int n);

/// Both sides of the reaction estimate at the point of the Z_sigma = 0 locus
/// with radial curvature `mu`. Throws NoRoot.
ReactionGap reaction_gap(double mu, double sigma, int n);

struct EulerResiduals {
  double r1 = 0;  ///< lambda f^1 + (n-1) mu f^2 - alpha f
  double r2 = 0;  ///< second-order Euler identity minus alpha (alpha - 1) f
};

/// Throws DomainError unless kappa is inside the speed's cone.
EulerResiduals euler_residuals(const SpeedSpec& speed, const CurvatureVector& kappa);

/// Parameters of the pinching functions Z_sigma and
/// Z_l = |h|^2 - H^2/n - sigma0 M_H^l H^{2-l}.
struct PinchParams {
  double sigma = 0;   ///< pinching parameter in (0, 1/(n(n-1))]
  double sigma0 = 0;  ///< initial pinching bound < 1/(n(n-1))
  double mh = 1;      ///< max of H on the initial hypersurface
  double l = 0.5;     ///< improvement exponent; l = 0 gives Z_{sigma0}
};

/// Throws BadParam if the invariants of PinchParams fail for dimension n.
void validate(const PinchParams& p, int n);

/// Value and partials of a symmetric function G at (lambda, mu, ..., mu),
/// same index convention as SpeedDerivatives.
struct GDerivatives {
  double g = 0;
  double g1 = 0, g2 = 0;
  double g11 = 0, g12 = 0, g22 = 0, g23 = 0;
};

GDerivatives z_sigma_derivatives(const CurvatureVector& k, double sigma);

struct ZlDerivatives {
  double g_hat = 0;  ///< sigma0 M_H^l H^{2-l}
  double g = 0;      ///< Z_l itself
  double g1 = 0, g2 = 0, g11 = 0, g12 = 0;
  double euler1_res = 0;  ///< lambda g1 + (n-1) mu g2 - (2G + l Ghat)
  double euler2_res = 0;  ///< second-order identity minus (2G - (l^2 - 3l) Ghat)

  GDerivatives as_g() const { return {g, g1, g2, g11, g12, g11, g12}; }
};

/// Requires H > 0.
ZlDerivatives zl_derivatives(const CurvatureVector& k, const PinchParams& p);

/// The point of the Z_l = 0 locus with mean curvature H (lambda < mu branch).
/// Throws NoRoot when the locus misses the cone at this H.
CurvatureVector zl_locus_point(double H, const PinchParams& p, int n);

// G specifications accepted by bracket_eval.
struct HomogeneousG {
  double degree = 2;
  GDerivatives values;
};
struct ZSigmaG {
  double sigma = 0;
};
struct ZlG {
  PinchParams params;
};
using GSpec = std::variant<HomogeneousG, ZSigmaG, ZlG>;

enum class BracketForm {
  Evofg,          ///< homogeneous F, G at a stationary point of G
  Evofg1,         ///< rotational-symmetry identity, no homogeneity needed
  Gradterms,      ///< Z_l at a zero maximum
  ZsigmaReduced,  ///< Z_sigma on its zero locus
};

struct BracketResult {
  double value = 0;  ///< coefficient of (nabla_1 h_22)^2
  BracketForm form = BracketForm::Evofg;
};

/// Coefficient of (nabla_1 h_22)^2 in the gradient terms of the evolution of
/// G. Throws DegeneratePoint (lambda = mu or g^1 = 0), OffLocus (Gradterms /
/// ZsigmaReduced off G = 0, relative tolerance 1e-9 H^2), BadParam (form and
/// G spec incompatible).
BracketResult bracket_eval(BracketForm form, const SpeedSpec& speed, const GSpec& g,
                           const CurvatureVector& kappa);

struct AdmissibleL {
  double l = 0;          ///< largest passing grid value, 0 if none
  bool warning = false;  ///< no grid value passed
  std::vector<double> grid;
  std::vector<bool> passes;  ///< per grid value
  std::vector<double> worst;  ///< max bracket / (f^1 Ghat / mu^2) per grid value
};

/// Largest l in {0.05, ..., 0.95} whose Gradterms bracket is <= 0 at
/// `samples` points of the Z_l = 0 locus with H in [M_H, 100 M_H].
AdmissibleL find_admissible_l(const SpeedSpec& speed, int n, double sigma0, double mh,
                              int samples);

/// Built-in speeds used by the sampling suites: mean-power alpha in {1, 2, 3}
/// for n in {2, 3, 4}, sigma2-power alpha in {1, 2} for n in {3, 4} and
/// blended-quadratic (1, 1) with alpha in {2, 3} for n in {2, 3}.
std::vector<SpeedSpec> builtin_speed_catalog();

struct AlgebraSuiteOptions {
  int identity_samples = 10000;
  int reaction_samples = 10000;
  int euler_samples = 1000;    ///< per catalog speed
  int bracket_samples = 1000;  ///< per catalog speed
  int sign_samples = 10000;    ///< per catalog speed with alpha > 1
  int gamma0_samples = 10000;
  /// find_admissible_l settings; skipped when admissible_samples is 0.
  double sigma0 = 0.2;
  double mh = 1.0;
  int admissible_samples = 200;
  std::uint64_t seed = 0x5eedULL;
};

struct SuiteResult {
  std::string name;
  int samples = 0;
  int violations = 0;
  double worst = 0;      ///< largest observed residual in the suite's own units
  double tolerance = 0;
};

struct AlgebraReport {
  std::vector<SuiteResult> suites;
  std::string admissible_speed;
  AdmissibleL admissible;
  std::uint64_t seed = 0;
  std::uint64_t draws = 0;

  int violations() const;
  const SuiteResult& suite(const std::string& name) const;
};

/// Runs the identity, reaction, Euler, cross-form, sign and g^1 suites over
/// the catalog, then find_admissible_l for `speed`.
AlgebraReport run_algebra_suites(const SpeedSpec& speed, const AlgebraSuiteOptions& options = {});

}  // namespace axiflow
