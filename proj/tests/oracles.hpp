#pragma once

// Closed forms and finite differences written independently of the library,
// used as reference values in the tests.

#include <cmath>
#include <functional>
#include <vector>

#include "axiflow/record.hpp"

namespace oracle {

// R(t)^{1+a} = R0^{1+a} - (1+a) n^a t for the shrinking sphere under H^a.
inline double sphere_radius(int n, double a, double R0, double t) {
  return std::pow(std::pow(R0, 1 + a) - (1 + a) * std::pow(n, a) * t, 1 / (1 + a));
}

inline double sphere_lifespan(int n, double a, double R0) {
  return std::pow(R0, 1 + a) / ((1 + a) * std::pow(n, a));
}

// Round cylinder: only n - 1 radial curvatures, so f = (n-1)^a r^{-a}.
inline double cylinder_radius(int n, double a, double r0, double t) {
  return std::pow(std::pow(r0, 1 + a) - (1 + a) * std::pow(n - 1, a) * t, 1 / (1 + a));
}

// Central differences on an n-vector function.
using Fn = std::function<double(const std::vector<double>&)>;

inline double d1(const Fn& f, std::vector<double> x, int i, double h) {
  x[i] += h;
  const double p = f(x);
  x[i] -= 2 * h;
  return (p - f(x)) / (2 * h);
}

inline double d2(const Fn& f, std::vector<double> x, int i, int j, double h) {
  if (i == j) {
    const double c = f(x);
    x[i] += h;
    const double p = f(x);
    x[i] -= 2 * h;
    return (p - 2 * c + f(x)) / (h * h);
  }
  double s = 0;
  for (int si : {1, -1})
    for (int sj : {1, -1}) {
      std::vector<double> y = x;
      y[i] += si * h;
      y[j] += sj * h;
      s += si * sj * f(y);
    }
  return s / (4 * h * h);
}

// Graph curvatures of u(x) = B sqrt(1 - x^2/A^2), an ellipse of semi-axes
// A (axial) and B (radial).
struct EllipseGraph {
  double A, B;
  double u(double x) const { return B * std::sqrt(1 - x * x / (A * A)); }
  double ux(double x) const { return -B * x / (A * A * std::sqrt(1 - x * x / (A * A))); }
  double uxx(double x) const {
    const double s = 1 - x * x / (A * A);
    return -B / (A * A * std::pow(s, 1.5));
  }
  double lambda(double x) const { return -uxx(x) / std::pow(1 + ux(x) * ux(x), 1.5); }
  double mu(double x) const { return 1 / (u(x) * std::sqrt(1 + ux(x) * ux(x))); }
};

// Checkpoints of the exact shrinking sphere under f = c H^a normalized to
// f(1..1) = n^a, at `count` equally spaced times on [0, 0.99 T].
inline axiflow::RunRecord sphere_record(int n, double a, double R0, int count) {
  axiflow::RunRecord r;
  r.n = n;
  r.alpha = a;
  r.nodes = 64;
  r.speed_id = "mean-power";
  r.terminal_reason = "max_curvature";
  const double T = sphere_lifespan(n, a, R0);
  for (int k = 0; k < count; ++k) {
    axiflow::Checkpoint c;
    c.t = 0.99 * T * k / (count - 1);
    c.step = k;
    c.event = k == 0 ? "start" : (k + 1 == count ? "terminal" : "step");
    const double R = sphere_radius(n, a, R0, c.t);
    c.a = c.b = R;
    c.ratio = 1;
    c.center = 0;
    c.min_lambda = c.max_lambda = c.min_mu = c.max_mu = 1 / R;
    c.mu_ratio = 1;
    c.min_mu_minus_lambda = 0;
    c.max_h = n / R;
    c.min_f = c.max_f = std::pow(n, a) * std::pow(R, -a);
    c.max_curvature = 1 / R;
    c.z_margin = -1.0 / (n * (n - 1.0));
    c.s_plus = c.s_minus = R;
    r.checkpoints.push_back(c);
  }
  return r;
}

}  // namespace oracle
