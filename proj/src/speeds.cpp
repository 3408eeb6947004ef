#include "axiflow/speeds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "axiflow/errors.hpp"
#include "axiflow/rng.hpp"

namespace axiflow {

std::string to_string(SpeedKind kind) {
  switch (kind) {
    case SpeedKind::MeanPower: return "mean-power";
    case SpeedKind::Sigma2Power: return "sigma2-power";
    case SpeedKind::BlendedQuadratic: return "blended-quadratic";
    case SpeedKind::UserSupplied: return "user-supplied";
  }
  return "unknown";
}

SpeedKind speed_kind_from_string(const std::string& name) {
  if (name == "mean-power") return SpeedKind::MeanPower;
  if (name == "sigma2-power") return SpeedKind::Sigma2Power;
  if (name == "blended-quadratic") return SpeedKind::BlendedQuadratic;
  if (name == "user-supplied") return SpeedKind::UserSupplied;
  throw BadParam("unknown speed kind '" + name + "'");
}

SpeedSpec SpeedSpec::create(SpeedKind kind, int n, double alpha,
                            std::vector<double> coefficients, bool enforce_cone) {
  if (n < 2) throw BadParam("dimension n must be >= 2");
  if (!std::isfinite(alpha) || alpha < 1.0)
    throw BadParam("homogeneity must be >= 1 (got alpha = " + std::to_string(alpha) + ")");

  SpeedSpec s;
  s.kind_ = kind;
  s.n_ = n;
  s.alpha_ = alpha;

  switch (kind) {
    case SpeedKind::MeanPower:
    case SpeedKind::Sigma2Power:
      if (!coefficients.empty())
        throw BadParam(to_string(kind) + " takes no coefficients");
      break;
    case SpeedKind::BlendedQuadratic:
      if (coefficients.size() != 2)
        throw BadParam("blended-quadratic needs coefficients [a, b]");
      if (!(coefficients[0] > 0.0)) throw BadParam("blended-quadratic needs a > 0");
      if (!(coefficients[1] >= 0.0)) throw BadParam("blended-quadratic needs b >= 0");
      break;
    case SpeedKind::UserSupplied:
      throw BadParam("use SpeedSpec::user_supplied for callback speeds");
  }
  s.coefficients_ = std::move(coefficients);

  if (kind == SpeedKind::Sigma2Power && n == 2) {
    if (enforce_cone)
      throw BadParam(
          "sigma2-power is not admissible for n = 2: sigma_2 = lambda * mu vanishes on the "
          "lambda = 0 face of the cone");
    s.cone_admissible_ = false;
  }

  const std::vector<double> ones(std::size_t(n), 1.0);
  const double at_ones = s.base(ones);
  if (!(at_ones > 0.0) || !std::isfinite(at_ones))
    throw BadParam("speed does not evaluate positively at (1, ..., 1)");
  s.normalizer_ = std::pow(double(n), alpha) / at_ones;
  return s;
}

SpeedSpec SpeedSpec::mean_power(int n, double alpha) {
  return create(SpeedKind::MeanPower, n, alpha);
}
SpeedSpec SpeedSpec::sigma2_power(int n, double alpha) {
  return create(SpeedKind::Sigma2Power, n, alpha);
}
SpeedSpec SpeedSpec::blended_quadratic(int n, double alpha, double a, double b) {
  return create(SpeedKind::BlendedQuadratic, n, alpha, {a, b});
}

SpeedSpec SpeedSpec::user_supplied(int n, double alpha, Callback f, std::string name) {
  if (n < 2) throw BadParam("dimension n must be >= 2");
  if (!std::isfinite(alpha) || alpha < 1.0)
    throw BadParam("homogeneity must be >= 1 (got alpha = " + std::to_string(alpha) + ")");
  if (!f) throw BadParam("user-supplied speed needs a callback");
  SpeedSpec s;
  s.kind_ = SpeedKind::UserSupplied;
  s.n_ = n;
  s.alpha_ = alpha;
  s.name_ = std::move(name);
  s.callback_ = std::move(f);
  const std::vector<double> ones(std::size_t(n), 1.0);
  const double at_ones = s.base(ones);
  if (!(at_ones > 0.0) || !std::isfinite(at_ones))
    throw BadParam("speed does not evaluate positively at (1, ..., 1)");
  s.normalizer_ = std::pow(double(n), alpha) / at_ones;
  return s;
}

std::string SpeedSpec::id() const {
  std::ostringstream os;
  os << (kind_ == SpeedKind::UserSupplied ? name_ : to_string(kind_)) << "(alpha=" << alpha_;
  if (kind_ == SpeedKind::BlendedQuadratic)
    os << ",a=" << coefficients_[0] << ",b=" << coefficients_[1];
  os << ",n=" << n_ << ")";
  return os.str();
}

double SpeedSpec::base(std::span<const double> l) const {
  const double h = std::accumulate(l.begin(), l.end(), 0.0);
  const double h2 = std::inner_product(l.begin(), l.end(), l.begin(), 0.0);
  switch (kind_) {
    case SpeedKind::MeanPower: return std::pow(h, alpha_);
    case SpeedKind::Sigma2Power: return std::pow(0.5 * (h * h - h2), 0.5 * alpha_);
    case SpeedKind::BlendedQuadratic:
      return std::pow(coefficients_[0] * h * h + coefficients_[1] * h2, 0.5 * alpha_);
    case SpeedKind::UserSupplied: return callback_(l);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double SpeedSpec::base(const CurvatureVector& k) const {
  switch (kind_) {
    case SpeedKind::MeanPower: return std::pow(k.mean(), alpha_);
    case SpeedKind::Sigma2Power: return std::pow(k.sigma2(), 0.5 * alpha_);
    case SpeedKind::BlendedQuadratic: {
      const double h = k.mean();
      return std::pow(coefficients_[0] * h * h + coefficients_[1] * k.norm2(), 0.5 * alpha_);
    }
    case SpeedKind::UserSupplied: {
      std::vector<double> full(std::size_t(k.n), k.mu);
      full[0] = k.lambda;
      return callback_(full);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double SpeedSpec::value(std::span<const double> lambdas) const {
  return normalizer_ * base(lambdas);
}

double SpeedSpec::value(const CurvatureVector& k) const { return normalizer_ * base(k); }

bool SpeedSpec::in_domain(const CurvatureVector& k) const {
  if (k.n != n_) return false;
  const double h = k.mean();
  if (!(h > 0.0)) return false;
  switch (kind_) {
    case SpeedKind::Sigma2Power: return k.sigma2() >= 0.0;
    case SpeedKind::BlendedQuadratic:
      return coefficients_[0] * h * h + coefficients_[1] * k.norm2() > 0.0;
    default: return true;
  }
}

namespace {

void check_domain(const SpeedSpec& speed, const CurvatureVector& k) {
  if (k.n != speed.n())
    throw DomainError("curvature vector has n = " + std::to_string(k.n) + ", speed has n = " +
                      std::to_string(speed.n()));
  if (!speed.in_domain(k)) {
    std::ostringstream os;
    os << "(lambda = " << k.lambda << ", mu = " << k.mu << ") outside the cone of "
       << speed.id();
    throw DomainError(os.str());
  }
}

std::vector<double> full_vector(const CurvatureVector& k) {
  std::vector<double> v(std::size_t(k.n), k.mu);
  v[0] = k.lambda;
  return v;
}

SpeedDerivatives finite_difference_derivatives(const SpeedSpec& speed, const CurvatureVector& k) {
  const double scale = k.magnitude();
  const double h1 = 1e-6 * scale;
  const double h2 = 1e-4 * scale;
  std::vector<double> v = full_vector(k);
  auto f_at = [&](std::initializer_list<std::pair<int, double>> shifts) {
    std::vector<double> w = v;
    for (auto [i, d] : shifts) w[std::size_t(i)] += d;
    return speed.value(w);
  };

  SpeedDerivatives d;
  d.f = speed.value(v);
  d.df1 = (f_at({{0, h1}}) - f_at({{0, -h1}})) / (2 * h1);
  d.df2 = (f_at({{1, h1}}) - f_at({{1, -h1}})) / (2 * h1);
  d.d2f11 = (f_at({{0, h2}}) - 2 * d.f + f_at({{0, -h2}})) / (h2 * h2);
  d.d2f22 = (f_at({{1, h2}}) - 2 * d.f + f_at({{1, -h2}})) / (h2 * h2);
  auto mixed = [&](int i, int j) {
    return (f_at({{i, h2}, {j, h2}}) - f_at({{i, h2}, {j, -h2}}) - f_at({{i, -h2}, {j, h2}}) +
            f_at({{i, -h2}, {j, -h2}})) /
           (4 * h2 * h2);
  };
  d.d2f12 = mixed(0, 1);
  d.d2f23 = k.n >= 3 ? mixed(1, 2) : 0.0;
  return d;
}

}  // namespace

double evaluate(const SpeedSpec& speed, const CurvatureVector& kappa) {
  check_domain(speed, kappa);
  const double f = speed.value(kappa);
  if (speed.cone_admissible() && cone_contains(kappa, 1e-12 * kappa.mu) && !(f > 0.0)) {
    std::ostringstream os;
    os << speed.id() << " evaluates to " << f << " at (lambda = " << kappa.lambda
       << ", mu = " << kappa.mu << ")";
    throw NonPositive(os.str());
  }
  return f;
}

SpeedDerivatives derivatives_unchecked(const SpeedSpec& speed, const CurvatureVector& k) {
  const double c = speed.normalizer();
  const double alpha = speed.alpha();
  const double n = k.n;
  SpeedDerivatives d;
  switch (speed.kind()) {
    case SpeedKind::MeanPower: {
      const double h = k.mean();
      d.f = c * std::pow(h, alpha);
      d.df1 = d.df2 = c * alpha * std::pow(h, alpha - 1);
      d.d2f11 = d.d2f12 = d.d2f22 = d.d2f23 =
          alpha == 1.0 ? 0.0 : c * alpha * (alpha - 1) * std::pow(h, alpha - 2);
      break;
    }
    case SpeedKind::Sigma2Power: {
      const double s = k.sigma2();
      const double p = 0.5 * alpha;
      const double a1 = (n - 1) * k.mu;             // d sigma2 / d lambda_1
      const double a2 = k.lambda + (n - 2) * k.mu;  // d sigma2 / d lambda_2
      const double first = c * p * std::pow(s, p - 1);
      const double second = p == 1.0 ? 0.0 : c * p * (p - 1) * std::pow(s, p - 2);
      d.f = c * std::pow(s, p);
      d.df1 = first * a1;
      d.df2 = first * a2;
      d.d2f11 = second * a1 * a1;
      d.d2f12 = second * a1 * a2 + first;
      d.d2f22 = second * a2 * a2;
      d.d2f23 = second * a2 * a2 + first;
      break;
    }
    case SpeedKind::BlendedQuadratic: {
      const double a = speed.coefficients()[0];
      const double b = speed.coefficients()[1];
      const double h = k.mean();
      const double q = a * h * h + b * k.norm2();
      const double p = 0.5 * alpha;
      const double q1 = 2 * a * h + 2 * b * k.lambda;
      const double q2 = 2 * a * h + 2 * b * k.mu;
      const double first = c * p * std::pow(q, p - 1);
      const double second = p == 1.0 ? 0.0 : c * p * (p - 1) * std::pow(q, p - 2);
      d.f = c * std::pow(q, p);
      d.df1 = first * q1;
      d.df2 = first * q2;
      d.d2f11 = second * q1 * q1 + first * (2 * a + 2 * b);
      d.d2f12 = second * q1 * q2 + first * 2 * a;
      d.d2f22 = second * q2 * q2 + first * (2 * a + 2 * b);
      d.d2f23 = second * q2 * q2 + first * 2 * a;
      break;
    }
    case SpeedKind::UserSupplied: return finite_difference_derivatives(speed, k);
  }
  if (k.n < 3) d.d2f23 = 0.0;
  return d;
}

SpeedDerivatives derivatives(const SpeedSpec& speed, const CurvatureVector& kappa) {
  check_domain(speed, kappa);
  return derivatives_unchecked(speed, kappa);
}

double tso_constant(const SpeedSpec& speed, int n, int grid) {
  if (n != speed.n()) throw BadParam("tso_constant: n does not match the speed");
  if (grid < 2) throw BadParam("tso_constant: grid must be >= 2");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double ratio = double(i) / double(grid - 1);
    CurvatureVector k{n, ratio, 1.0};
    k = k.scaled(1.0 / k.magnitude());
    const SpeedDerivatives d = derivatives_unchecked(speed, k);
    const double q = (d.df1 * k.lambda * k.lambda + (n - 1) * d.df2 * k.mu * k.mu) / (d.f * d.f);
    best = std::min(best, std::isfinite(q) ? q : -std::numeric_limits<double>::infinity());
  }
  if (!(best > 0.0))
    throw NonPositive("tso_constant: minimum " + std::to_string(best) + " is not positive for " +
                      speed.id());
  return best;
}

Comparability comparability_bounds(const SpeedSpec& speed, int grid) {
  if (grid < 2) throw BadParam("comparability_bounds: grid must be >= 2");
  Comparability c{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < grid; ++i) {
    const CurvatureVector k{speed.n(), double(i) / double(grid - 1), 1.0};
    const double r = speed.value(k) / std::pow(k.mean(), speed.alpha());
    c.m1 = std::min(c.m1, r);
    c.m2 = std::max(c.m2, r);
  }
  return c;
}

AssumptionReport verify_assumptions(const SpeedSpec& speed, int n, int samples,
                                    std::uint64_t seed) {
  if (n != speed.n()) throw BadParam("verify_assumptions: n does not match the speed");
  if (samples < 1) throw BadParam("verify_assumptions: need at least one sample");

  constexpr double kHomogeneityTol = 1e-10;
  constexpr double kSymmetryTol = 1e-12;
  constexpr double kNormalizationTol = 1e-12;
  constexpr std::array<double, 3> kScales{0.5, 2.0, 10.0};

  AssumptionReport r;
  r.samples = samples;
  r.min_scaled_value = std::numeric_limits<double>::infinity();
  r.monotonicity_margin = std::numeric_limits<double>::infinity();

  CounterRng rng(seed);
  for (int s = 0; s < samples; ++s) {
    // Every fourth sample sits on the lambda = 0 face.
    const double ratio = (s % 4 == 0) ? 0.0 : rng.uniform();
    const double mu = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const CurvatureVector k{n, ratio * mu, mu};
    const double norm = k.magnitude();
    const double f = speed.value(k);

    r.min_scaled_value = std::min(r.min_scaled_value, f / std::pow(norm, speed.alpha()));

    const SpeedDerivatives d = derivatives_unchecked(speed, k);
    const double margin = std::min(d.df1, d.df2) / (std::abs(f) / norm);
    r.monotonicity_margin =
        std::min(r.monotonicity_margin, std::isfinite(margin) ? margin : -1.0);

    for (double c : kScales) {
      const double fc = speed.value(k.scaled(c));
      const double res = std::abs(fc - std::pow(c, speed.alpha()) * f) / std::abs(fc);
      r.homogeneity_residual =
          std::max(r.homogeneity_residual, std::isfinite(res) ? res : 1.0);
    }

    // Swap the axial entry with a radial one.
    std::vector<double> v(std::size_t(n), mu);
    v[0] = k.lambda;
    std::vector<double> p = v;
    std::swap(p[0], p[std::size_t(n - 1)]);
    const double fv = speed.value(v);
    const double fp = speed.value(p);
    const double sym = fv == fp ? 0.0 : std::abs(fp - fv) / std::max(std::abs(fv), 1e-300);
    r.symmetry_residual = std::max(r.symmetry_residual, sym);
  }

  const std::vector<double> ones(std::size_t(n), 1.0);
  const double target = std::pow(double(n), speed.alpha());
  r.normalization_residual = std::abs(speed.value(ones) - target) / target;

  r.symmetric = r.symmetry_residual <= kSymmetryTol;
  r.positive = r.min_scaled_value > 0.0;
  r.monotone = r.monotonicity_margin > 0.0;
  r.homogeneous = r.homogeneity_residual <= kHomogeneityTol;
  r.normalized = r.normalization_residual <= kNormalizationTol;
  if (!r.symmetric) r.failures.push_back("symmetry");
  if (!r.positive) r.failures.push_back("positivity");
  if (!r.monotone) r.failures.push_back("monotonicity");
  if (!r.homogeneous) r.failures.push_back("homogeneity");
  if (!r.normalized) r.failures.push_back("normalization");
  return r;
}

}  // namespace axiflow
