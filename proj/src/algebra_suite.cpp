#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "axiflow/curvature_algebra.hpp"
#include "axiflow/errors.hpp"
#include "axiflow/rng.hpp"

namespace axiflow {

std::vector<SpeedSpec> builtin_speed_catalog() {
  std::vector<SpeedSpec> out;
  for (int n : {2, 3, 4})
    for (double a : {1.0, 2.0, 3.0}) out.push_back(SpeedSpec::mean_power(n, a));
  for (int n : {3, 4})
    for (double a : {1.0, 2.0}) out.push_back(SpeedSpec::sigma2_power(n, a));
  for (int n : {2, 3})
    for (double a : {2.0, 3.0}) out.push_back(SpeedSpec::blended_quadratic(n, a, 1.0, 1.0));
  return out;
}

int AlgebraReport::violations() const {
  int v = 0;
  for (const auto& s : suites) v += s.violations;
  return v;
}

const SuiteResult& AlgebraReport::suite(const std::string& name) const {
  for (const auto& s : suites)
    if (s.name == name) return s;
  throw std::out_of_range("no algebra suite named '" + name + "'");
}

namespace {

class Suite {
 public:
  Suite(std::string name, double tolerance) {
    r_.name = std::move(name);
    r_.tolerance = tolerance;
  }
  // residual > tolerance counts as a violation
  void add(double residual) {
    ++r_.samples;
    if (!(residual <= r_.tolerance)) ++r_.violations;
    if (r_.samples == 1 || !(residual <= r_.worst)) r_.worst = residual;
  }
  SuiteResult result() const { return r_; }

 private:
  SuiteResult r_;
};

double cap(int n) { return 1.0 / (n * (n - 1.0)); }

double log_uniform(CounterRng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

AlgebraReport run_algebra_suites(const SpeedSpec& speed, const AlgebraSuiteOptions& o) {
  AlgebraReport report;
  report.seed = o.seed;
  CounterRng rng(o.seed);
  const std::vector<SpeedSpec> catalog = builtin_speed_catalog();

  {
    Suite s("pinch_identity", 1e-12);
    for (int i = 0; i < o.identity_samples; ++i) {
      const int n = rng.uniform_int(2, 6);
      const double mu = log_uniform(rng, 0.1, 10.0);
      const CurvatureVector k{n, rng.uniform(0.0, mu), mu};
      const auto p = pinch_identity(k);
      s.add(std::abs(p.lhs - p.rhs) / std::max(1.0, std::abs(p.lhs)));
    }
    report.suites.push_back(s.result());
  }

  {
    // residual: (rhs - lhs) / |rhs|, so the inequality holds iff <= 1e-10
    Suite s("reaction_gap", 1e-10);
    for (int i = 0; i < o.reaction_samples; ++i) {
      const int n = rng.uniform_int(2, 6);
      const double mu = log_uniform(rng, 0.1, 10.0);
      const double sigma = cap(n) * (1.0 - rng.uniform());
      const ReactionGap g = reaction_gap(mu, sigma, n);
      const double scale = std::abs(g.rhs) > 0.0 ? std::abs(g.rhs) : 1.0;
      s.add((g.rhs - g.lhs) / scale);
    }
    report.suites.push_back(s.result());
  }

  {
    Suite s("euler_residuals", 1e-9);
    for (const auto& sp : catalog) {
      for (int i = 0; i < o.euler_samples; ++i) {
        const double mu = log_uniform(rng, 0.1, 10.0);
        const CurvatureVector k{sp.n(), mu * rng.uniform(0.01, 0.99), mu};
        const EulerResiduals r = euler_residuals(sp, k);
        const double f = evaluate(sp, k);
        s.add(std::max(std::abs(r.r1), std::abs(r.r2)) / f);
      }
    }
    report.suites.push_back(s.result());
  }

  {
    Suite s("evofg_vs_evofg1", 1e-10);
    for (const auto& sp : catalog) {
      for (int i = 0; i < o.bracket_samples; ++i) {
        const int n = sp.n();
        const double mu = log_uniform(rng, 0.1, 10.0);
        const double sigma = cap(n) * rng.uniform(0.02, 1.0);
        const CurvatureVector k{n, z_sigma_root(mu, sigma, n), mu};
        const HomogeneousG g{2.0, z_sigma_derivatives(k, sigma)};
        s.add(rel(bracket_eval(BracketForm::Evofg, sp, g, k).value,
                  bracket_eval(BracketForm::Evofg1, sp, g, k).value));
      }
    }
    report.suites.push_back(s.result());
  }

  {
    Suite s("gradterms_vs_evofg1", 1e-9);
    for (const auto& sp : catalog) {
      const int n = sp.n();
      int taken = 0;
      while (taken < o.bracket_samples) {
        PinchParams p;
        p.sigma = cap(n);
        p.sigma0 = cap(n) * rng.uniform(0.05, 0.95);
        p.mh = log_uniform(rng, 0.1, 10.0);
        p.l = rng.uniform(0.05, 0.95);
        const double H = p.mh * log_uniform(rng, 1.0, 100.0);
        CurvatureVector k;
        try {
          k = zl_locus_point(H, p, n);
        } catch (const NoRoot&) {
          continue;
        }
        ++taken;
        const HomogeneousG assembled{std::nan(""), zl_derivatives(k, p).as_g()};
        s.add(rel(bracket_eval(BracketForm::Gradterms, sp, ZlG{p}, k).value,
                  bracket_eval(BracketForm::Evofg1, sp, assembled, k).value));
      }
    }
    report.suites.push_back(s.result());
  }

  {
    // residual is the bracket scaled by f^1 |g^1| / mu^2; positive violates
    Suite s("zsigma_reduced_sign", 0.0);
    for (const auto& sp : catalog) {
      if (!(sp.alpha() > 1.0)) continue;
      const int n = sp.n();
      for (int i = 0; i < o.sign_samples; ++i) {
        const double mu = log_uniform(rng, 0.1, 10.0);
        const double sigma = cap(n) * (1.0 - rng.uniform());
        const CurvatureVector k{n, z_sigma_root(mu, sigma, n), mu};
        if (!(k.lambda < k.mu)) continue;
        const double v = bracket_eval(BracketForm::ZsigmaReduced, sp, ZSigmaG{sigma}, k).value;
        const double scale =
            derivatives(sp, k).df1 * std::abs(z_sigma_derivatives(k, sigma).g1) / (mu * mu);
        s.add(v / scale);
      }
    }
    report.suites.push_back(s.result());
  }

  {
    Suite s("zl_g1_negative", 0.0);
    Suite e("zl_euler", 1e-9);
    for (int i = 0; i < o.gamma0_samples; ++i) {
      const int n = rng.uniform_int(2, 6);
      const double mu = log_uniform(rng, 0.1, 10.0);
      const CurvatureVector k{n, rng.uniform(0.0, mu), mu};
      PinchParams p;
      p.sigma = cap(n);
      p.sigma0 = cap(n) * rng.uniform(0.01, 0.99);
      p.mh = log_uniform(rng, 0.1, 10.0);
      p.l = rng.uniform(0.01, 0.99);
      const ZlDerivatives z = zl_derivatives(k, p);
      const double h = k.mean();
      s.add(z.g1 / h);
      e.add(std::max(std::abs(z.euler1_res), std::abs(z.euler2_res)) / (h * h));
    }
    report.suites.push_back(s.result());
    report.suites.push_back(e.result());
  }

  report.draws = rng.counter();
  report.admissible_speed = speed.id();
  if (o.admissible_samples > 0)
    report.admissible = find_admissible_l(speed, speed.n(), o.sigma0, o.mh, o.admissible_samples);
  return report;
}

}  // namespace axiflow
