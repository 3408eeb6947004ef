#include "axiflow/curvature_algebra.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "axiflow/errors.hpp"

namespace axiflow {

double z_sigma_root(double mu, double sigma, int n) {
  if (!(mu > 0.0)) throw NoRoot("z_sigma_root: mu must be positive");
  if (n < 2) throw BadParam("z_sigma_root: n must be >= 2");
  const double k = 1.0 / n + sigma;
  const double nm1 = n - 1;
  // (1-k) lambda^2 - 2k(n-1) mu lambda + (n-1)(1 - k(n-1)) mu^2 = 0
  const double a = 1.0 - k;
  const double b = -2.0 * k * nm1 * mu;
  const double c = nm1 * (1.0 - k * nm1) * mu * mu;
  const double tol = 1e-12 * mu;

  std::vector<double> roots;
  if (std::abs(a) <= 1e-15) {
    roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4 * a * c;
    if (disc < -1e-14 * b * b) throw NoRoot("z_sigma_root: complex roots");
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double q = -0.5 * (b + std::copysign(sq, b));
    if (q != 0.0) {
      roots.push_back(q / a);
      roots.push_back(c / q);
    } else {
      roots.push_back(0.0);
    }
  }
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double r : roots) {
    if (r >= -tol && r <= mu + tol) {
      const double clamped = std::min(std::max(r, 0.0), mu);
      if (!(best <= clamped)) best = clamped;
    }
  }
  if (std::isnan(best)) {
    std::ostringstream os;
    os << "Z_sigma = 0 has no root lambda in [0, mu] for mu = " << mu << ", sigma = " << sigma
       << ", n = " << n;
    throw NoRoot(os.str());
  }
  return best;
}

ReactionGap reaction_gap(double mu, double sigma, int n) {
  const double lambda = z_sigma_root(mu, sigma, n);
  const CurvatureVector k{n, lambda, mu};
  const double h = k.mean();
  ReactionGap g;
  g.lambda = lambda;
  g.lhs = n * k.cubic() - (1 + n * sigma) * h * k.norm2();
  g.rhs = sigma * (1 + n * sigma) * (1 - std::sqrt(std::max(0.0, n * (n - 1) * sigma))) * h *
          h * h;
  return g;
}

EulerResiduals euler_residuals(const SpeedSpec& speed, const CurvatureVector& k) {
  if (!cone_contains(k)) throw DomainError("euler_residuals: curvature vector outside the cone");
  const SpeedDerivatives d = derivatives(speed, k);
  const double n = k.n;
  const double a = speed.alpha();
  EulerResiduals r;
  r.r1 = k.lambda * d.df1 + (n - 1) * k.mu * d.df2 - a * d.f;
  r.r2 = k.lambda * k.lambda * d.d2f11 + 2 * (n - 1) * k.lambda * k.mu * d.d2f12 +
         (n - 1) * k.mu * k.mu * d.d2f22 + (n - 1) * (n - 2) * k.mu * k.mu * d.d2f23 -
         a * (a - 1) * d.f;
  return r;
}

void validate(const PinchParams& p, int n) {
  const double cap = 1.0 / (n * (n - 1.0));
  if (!(p.sigma > 0.0 && p.sigma <= cap))
    throw BadParam("PinchParams: sigma must lie in (0, 1/(n(n-1))]");
  if (!(p.sigma0 > 0.0 && p.sigma0 < cap))
    throw BadParam("PinchParams: sigma0 must lie in (0, 1/(n(n-1)))");
  if (!(p.mh > 0.0)) throw BadParam("PinchParams: M_H must be positive");
  if (!(p.l > 0.0 && p.l < 1.0)) throw BadParam("PinchParams: l must lie in (0, 1)");
}

GDerivatives z_sigma_derivatives(const CurvatureVector& k, double sigma) {
  const double c = 1.0 / k.n + sigma;
  const double h = k.mean();
  GDerivatives g;
  g.g = z_sigma(k, sigma);
  g.g1 = 2 * (k.lambda - c * h);
  g.g2 = 2 * (k.mu - c * h);
  g.g11 = g.g22 = 2 - 2 * c;
  g.g12 = g.g23 = -2 * c;
  return g;
}

ZlDerivatives zl_derivatives(const CurvatureVector& k, const PinchParams& p) {
  const double h = k.mean();
  if (!(h > 0.0)) throw DomainError("zl_derivatives: H must be positive");
  const double n = k.n;
  const double l = p.l;
  ZlDerivatives z;
  z.g_hat = p.sigma0 * std::pow(p.mh, l) * std::pow(h, 2 - l);
  z.g = k.norm2() - h * h / n - z.g_hat;
  z.g1 = 2 * (k.lambda - h / n) - (2 - l) * z.g_hat / h;
  z.g2 = 2 * (k.mu - h / n) - (2 - l) * z.g_hat / h;
  const double curv = (2 - l) * (1 - l) * z.g_hat / (h * h);
  z.g11 = 2 - 2 / n - curv;
  z.g12 = -2 / n - curv;
  z.euler1_res = k.lambda * z.g1 + (n - 1) * k.mu * z.g2 - (2 * z.g + l * z.g_hat);
  z.euler2_res = k.lambda * k.lambda * z.g11 + 2 * (n - 1) * k.lambda * k.mu * z.g12 +
                 (n - 1) * k.mu * k.mu * z.g11 + (n - 1) * (n - 2) * k.mu * k.mu * z.g12 -
                 (2 * z.g - (l * l - 3 * l) * z.g_hat);
  return z;
}

CurvatureVector zl_locus_point(double H, const PinchParams& p, int n) {
  if (!(H > 0.0)) throw NoRoot("zl_locus_point: H must be positive");
  const double g_hat = p.sigma0 * std::pow(p.mh, p.l) * std::pow(H, 2 - p.l);
  // |h|^2 - H^2/n = (n-1)(mu - lambda)^2 / n on (lambda, mu, ..., mu)
  const double gap = std::sqrt(n * g_hat / (n - 1.0));
  const double lambda = (H - (n - 1) * gap) / n;
  if (lambda < -1e-12 * H) throw NoRoot("zl_locus_point: locus leaves the cone at this H");
  return {n, std::max(lambda, 0.0), std::max(lambda, 0.0) + gap};
}

namespace {

const char* form_name(BracketForm f) {
  switch (f) {
    case BracketForm::Evofg: return "evofg";
    case BracketForm::Evofg1: return "evofg1";
    case BracketForm::Gradterms: return "gradterms";
    case BracketForm::ZsigmaReduced: return "zsigma_reduced";
  }
  return "?";
}

struct ResolvedG {
  GDerivatives d;
  double degree = std::numeric_limits<double>::quiet_NaN();  // NaN: not homogeneous
  double g_hat = 0;
  double l = 0;
  bool is_zl = false;
  bool is_zsigma = false;
  double sigma = 0;
};

ResolvedG resolve(const GSpec& spec, const CurvatureVector& k) {
  ResolvedG r;
  if (const auto* h = std::get_if<HomogeneousG>(&spec)) {
    r.d = h->values;
    r.degree = h->degree;
  } else if (const auto* z = std::get_if<ZSigmaG>(&spec)) {
    r.d = z_sigma_derivatives(k, z->sigma);
    r.degree = 2;
    r.is_zsigma = true;
    r.sigma = z->sigma;
  } else {
    const auto& zl = std::get<ZlG>(spec);
    const ZlDerivatives d = zl_derivatives(k, zl.params);
    r.d = d.as_g();
    r.g_hat = d.g_hat;
    r.l = zl.params.l;
    r.is_zl = true;
  }
  return r;
}

}  // namespace

BracketResult bracket_eval(BracketForm form, const SpeedSpec& speed, const GSpec& gspec,
                           const CurvatureVector& k) {
  const double lambda = k.lambda;
  const double mu = k.mu;
  const double n = k.n;
  const double h = k.mean();
  if (std::abs(lambda - mu) <= 1e-12 * std::abs(mu))
    throw DegeneratePoint(std::string(form_name(form)) + ": umbilic point (lambda = mu)");

  const ResolvedG g = resolve(gspec, k);
  if (std::abs(g.d.g1) <= 1e-14 * std::max(std::abs(h), 1.0))
    throw DegeneratePoint(std::string(form_name(form)) + ": g^1 = 0");

  const auto require_locus = [&] {
    if (std::abs(g.d.g) > 1e-9 * h * h) {
      std::ostringstream os;
      os << form_name(form) << ": G = " << g.d.g << " is off the zero locus (H = " << h << ")";
      throw OffLocus(os.str());
    }
  };

  const SpeedDerivatives f = derivatives(speed, k);
  const double a = speed.alpha();
  const double mm = mu * mu;
  const double lm = lambda - mu;
  // The mixed combinations (g^1 f^{ij} - f^1 g^{ij}) that every form shares.
  const double c11 = g.d.g1 * f.d2f11 - f.df1 * g.d.g11;
  const double c12 = g.d.g1 * f.d2f12 - f.df1 * g.d.g12;
  const double c22 = g.d.g1 * f.d2f22 - f.df1 * g.d.g22;
  const double c23 = g.d.g1 * f.d2f23 - f.df1 * g.d.g23;

  BracketResult out;
  out.form = form;
  switch (form) {
    case BracketForm::Evofg: {
      if (std::isnan(g.degree)) throw BadParam("evofg needs a homogeneous G");
      const double b = g.degree;
      const double gv = g.d.g;
      const double g1 = g.d.g1;
      out.value = g1 * a * (a - 1) * f.f / mm - f.df1 * b * (b - 1) * gv / mm -
                  2 * g1 * a * f.f / (mu * lm) + 2 * f.df1 * b * gv / (mu * lm) +
                  (b * b * gv * gv / (mm * g1 * g1) - 2 * b * gv * lambda / (mm * g1)) * c11 -
                  2 * (n - 1) * b * gv / (mu * g1) * c12;
      break;
    }
    case BracketForm::Evofg1: {
      const double ratio = g.d.g2 / g.d.g1;
      out.value = (n - 1) * (n - 1) * ratio * ratio * c11 - 2 * (n - 1) * (n - 1) * ratio * c12 +
                  (n - 1) * c22 + (n - 1) * (n - 2) * c23 +
                  2 * (n - 1) * (g.d.g2 * f.df1 - f.df2 * g.d.g1) / lm;
      break;
    }
    case BracketForm::Gradterms: {
      if (!g.is_zl) throw BadParam("gradterms needs the Z_l specification");
      require_locus();
      const double l = g.l;
      const double gh = g.g_hat;
      const double g1 = g.d.g1;
      out.value = g1 * a * (a - 1) * f.f / mm + f.df1 * (l * l - 3 * l) * gh / mm -
                  2 * g1 * a * f.f / (mu * lm) + 2 * f.df1 * l * gh / (mu * lm) +
                  (l * l * gh * gh / (mm * g1 * g1) - 2 * l * gh * lambda / (mm * g1)) * c11 -
                  2 * (n - 1) * l * gh / (mu * g1) * c12;
      break;
    }
    case BracketForm::ZsigmaReduced: {
      if (!g.is_zsigma) throw BadParam("zsigma_reduced needs the Z_sigma specification");
      require_locus();
      out.value = g.d.g1 * (a * (a - 1) * f.f / mm - 2 * a * f.f / (mu * lm));
      break;
    }
  }
  return out;
}

AdmissibleL find_admissible_l(const SpeedSpec& speed, int n, double sigma0, double mh,
                              int samples) {
  if (n != speed.n()) throw BadParam("find_admissible_l: n does not match the speed");
  if (!(sigma0 > 0.0 && sigma0 < 1.0 / (n * (n - 1.0))))
    throw BadParam("find_admissible_l: sigma0 must lie in (0, 1/(n(n-1)))");
  if (samples < 2) throw BadParam("find_admissible_l: need at least two samples");

  AdmissibleL out;
  for (int i = 1; i <= 19; ++i) out.grid.push_back(0.05 * i);

  for (double l : out.grid) {
    PinchParams p;
    p.sigma = 1.0 / (n * (n - 1.0));
    p.sigma0 = sigma0;
    p.mh = mh;
    p.l = l;
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      const double H = mh * std::pow(100.0, double(s) / double(samples - 1));
      const CurvatureVector k = zl_locus_point(H, p, n);
      const double value = bracket_eval(BracketForm::Gradterms, speed, ZlG{p}, k).value;
      const ZlDerivatives z = zl_derivatives(k, p);
      const double scale = derivatives(speed, k).df1 * z.g_hat / (k.mu * k.mu);
      worst = std::max(worst, value / scale);
      if (value > 0.0) ok = false;
    }
    out.passes.push_back(ok);
    out.worst.push_back(worst);
    if (ok) out.l = l;
  }
  out.warning = out.l == 0.0;
  return out;
}

}  // namespace axiflow
