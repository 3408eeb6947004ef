#include "axiflow/profile.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "axiflow/errors.hpp"

namespace axiflow {

namespace {

using Vec2 = Eigen::Vector2d;

constexpr int kDensitySweeps = 16;

double curve_scale(const GeneratingCurve& c) {
  return std::max(c.x.maxCoeff() - c.x.minCoeff(), c.u.maxCoeff());
}

// Node i with mirror ghosts at i = -1 and i = N + 1.
Vec2 extended_node(const GeneratingCurve& c, Eigen::Index i) {
  const Eigen::Index last = c.segments();
  if (i < 0) return {c.x(-i), -c.u(-i)};
  if (i > last) return {c.x(2 * last - i), -c.u(2 * last - i)};
  return c.node(i);
}

// Peak of the parabola through (-1, vm), (0, v0), (1, vp).
double parabolic_peak(double vm, double v0, double vp) {
  const double denom = 2 * v0 - vm - vp;
  if (!(denom > 0.0)) return v0;
  return v0 + (vp - vm) * (vp - vm) / (8 * denom);
}

// Signed tangent turning across the chord q - p on the circle through p, q, r
// (positive for a left turn).
double arc_turning(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& from, const Vec2& to) {
  const Vec2 a = q - p;
  const Vec2 b = r - q;
  const double cross = a.x() * b.y() - a.y() * b.x();
  const double kappa = 2.0 * cross / (a.norm() * b.norm() * (r - p).norm());
  const double half = 0.5 * kappa * (to - from).norm();
  return 2.0 * std::asin(std::clamp(half, -1.0, 1.0));
}

// Point at fraction t of the circular arc with turning phi over the unit
// chord [0, 1], as a complex number (e^{i phi t} - 1) / (e^{i phi} - 1).
Vec2 unit_arc(double phi, double t) {
  if (std::abs(phi) < 1e-8) return {t, 0.5 * phi * t * (t - 1.0)};
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> z = (std::exp(i * (phi * t)) - 1.0) / (std::exp(i * phi) - 1.0);
  return {z.real(), z.imag()};
}

// Interpolant used by resample(): on each segment a blend of the two
// circumcircle arcs through the segment's neighbourhoods. Exact on circles
// and straight lines.
struct ArcCurve {
  std::vector<Vec2> points;   // nodes 0..N
  std::vector<double> left;   // turning of the arc through nodes i-1, i, i+1 on segment i
  std::vector<double> right;  // turning of the arc through nodes i, i+1, i+2 on segment i
  std::vector<double> s;      // chord-length parameter

  Vec2 eval(std::size_t seg, double t) const {
    const Vec2& p = points[seg];
    const Vec2 d = points[seg + 1] - p;
    const Vec2 za = unit_arc(left[seg], t);
    const Vec2 zb = unit_arc(right[seg], t);
    const Vec2 z = (1.0 - t) * za + t * zb;
    return p + Vec2(d.x() * z.x() - d.y() * z.y(), d.x() * z.y() + d.y() * z.x());
  }
  double turning(std::size_t seg) const { return 0.5 * std::abs(left[seg] + right[seg]); }
};

ArcCurve arc_curve(const GeneratingCurve& c) {
  const Eigen::Index last = c.segments();
  ArcCurve ac;
  ac.points.resize(std::size_t(last + 1));
  ac.s.assign(std::size_t(last + 1), 0.0);
  ac.left.resize(std::size_t(last));
  ac.right.resize(std::size_t(last));
  for (Eigen::Index i = 0; i <= last; ++i) ac.points[std::size_t(i)] = c.node(i);
  for (Eigen::Index i = 0; i < last; ++i) {
    const Vec2 p = c.node(i);
    const Vec2 q = c.node(i + 1);
    ac.s[std::size_t(i + 1)] = ac.s[std::size_t(i)] + (q - p).norm();
    ac.left[std::size_t(i)] = arc_turning(extended_node(c, i - 1), p, q, p, q);
    ac.right[std::size_t(i)] = arc_turning(p, q, extended_node(c, i + 2), p, q);
  }
  return ac;
}

struct Placement {
  std::size_t seg = 0;
  double t = 0;
};

// Where node j of the redistributed curve falls on the current segments:
// equal shares of the smoothed arclength-plus-turning measure.
void place_nodes(const ArcCurve& ac, double angle_weight, std::vector<Placement>& out) {
  const std::size_t segs = ac.left.size();
  const double total = ac.s.back();
  std::vector<double> density(segs), smoothed(segs), measure(segs + 1, 0.0);
  double turning = 0.0;
  for (std::size_t i = 0; i < segs; ++i) turning += ac.turning(i);
  const double angle_scale = turning > 0.0 ? angle_weight / turning : 0.0;
  for (std::size_t i = 0; i < segs; ++i)
    density[i] = 1.0 / total + angle_scale * ac.turning(i) / (ac.s[i + 1] - ac.s[i]);
  for (int sweep = 0; sweep < kDensitySweeps; ++sweep) {
    for (std::size_t i = 0; i < segs; ++i) {
      const double lo = density[i == 0 ? 0 : i - 1];
      const double hi = density[i + 1 == segs ? i : i + 1];
      smoothed[i] = 0.25 * lo + 0.5 * density[i] + 0.25 * hi;
    }
    density.swap(smoothed);
  }
  for (std::size_t i = 0; i < segs; ++i)
    measure[i + 1] = measure[i] + density[i] * (ac.s[i + 1] - ac.s[i]);

  out.assign(segs + 1, Placement{});
  out[segs] = {segs - 1, 1.0};
  std::size_t seg = 0;
  for (std::size_t j = 1; j < segs; ++j) {
    const double target = measure.back() * double(j) / double(segs);
    while (seg + 1 < segs && measure[seg + 1] < target) ++seg;
    const double t = (target - measure[seg]) / (measure[seg + 1] - measure[seg]);
    out[j] = {seg, std::clamp(t, 0.0, 1.0)};
  }
}

}  // namespace

void validate(const GeneratingCurve& c) {
  if (c.n < 2) throw BadParam("curve: n must be >= 2");
  if (c.x.size() != c.u.size()) throw BadParam("curve: x and u differ in length");
  if (c.x.size() < 5) throw BadParam("curve: need at least 5 nodes");
  const Eigen::Index last = c.segments();
  if (c.u(0) != 0.0 || c.u(last) != 0.0) throw BadParam("curve: poles must lie on the axis");
  for (Eigen::Index i = 1; i < last; ++i)
    if (!(c.u(i) > 0.0)) throw BadParam("curve: interior node on or below the axis");
  for (Eigen::Index i = 1; i <= last; ++i)
    if (!(c.x(i) > c.x(i - 1))) throw BadParam("curve: x must increase along the nodes");
  const double scale = curve_scale(c);
  for (Eigen::Index i = 1; i <= last; ++i)
    if ((c.node(i) - c.node(i - 1)).norm() <= 1e-14 * scale)
      throw DegenerateMesh("curve: coincident nodes " + std::to_string(i - 1) + ", " +
                           std::to_string(i));
}

CurveGeometry geometry(const GeneratingCurve& c) {
  const Eigen::Index count = c.nodes();
  const Eigen::Index last = c.segments();
  const double scale = curve_scale(c);
  CurveGeometry g;
  g.lambda.resize(count);
  g.mu.resize(count);
  g.normal_x.resize(count);
  g.normal_u.resize(count);

  for (Eigen::Index i = 0; i <= last; ++i) {
    const Vec2 p = extended_node(c, i - 1);
    const Vec2 q = c.node(i);
    const Vec2 r = extended_node(c, i + 1);
    const Vec2 a = q - p;
    const Vec2 b = r - q;
    const double la = a.norm();
    const double lb = b.norm();
    const double lc = (r - p).norm();
    if (la <= 1e-14 * scale || lb <= 1e-14 * scale)
      throw DegenerateMesh("geometry: coincident nodes around node " + std::to_string(i));

    // Clockwise traversal: negative signed curvature on convex arcs.
    const double cross = a.x() * b.y() - a.y() * b.x();
    g.lambda(i) = -2.0 * cross / (la * lb * lc);

    // Tangent of the circle through p, q, r at q.
    const Vec2 t = a * (lb / la) + b * (la / lb);
    const double tn = t.norm();
    g.normal_x(i) = -t.y() / tn;
    g.normal_u(i) = t.x() / tn;

    if (i == 0 || i == last) {
      g.normal_u(i) = 0.0;
      g.mu(i) = g.lambda(i);
    } else {
      g.mu(i) = g.normal_u(i) / c.u(i);
    }
  }
  return g;
}

std::vector<CurvatureVector> curvatures_at(const GeneratingCurve& c) {
  const CurveGeometry g = geometry(c);
  std::vector<CurvatureVector> out;
  out.reserve(std::size_t(c.nodes()));
  for (Eigen::Index i = 0; i < c.nodes(); ++i) out.push_back(g.at(i, c.n));
  return out;
}

GeneratingCurve make_sphere(double R, int N, int n) {
  if (!(R > 0.0)) throw BadParam("make_sphere: R must be positive");
  if (N < 16) throw BadParam("make_sphere: N must be >= 16");
  if (n < 2) throw BadParam("make_sphere: n must be >= 2");
  return make_spherocylinder(0.0, R, N, n);
}

GeneratingCurve make_spherocylinder(double l, double r, int N, int n, double angle_weight) {
  if (!(l >= 0.0)) throw BadParam("make_spherocylinder: l must be >= 0");
  if (!(r > 0.0)) throw BadParam("make_spherocylinder: r must be positive");
  if (N < 16) throw BadParam("make_spherocylinder: N must be >= 16");
  if (n < 2) throw BadParam("make_spherocylinder: n must be >= 2");
  if (!(angle_weight >= 0.0)) throw BadParam("make_spherocylinder: angle_weight must be >= 0");

  const double pi = std::numbers::pi;
  const double cap = 0.5 * pi * r;
  const double total = 2 * cap + 2 * l;
  auto point = [&](double s) -> Vec2 {
    if (s <= cap) return {-l - r * std::cos(s / r), r * std::sin(s / r)};
    if (s < cap + 2 * l) return {-l + (s - cap), r};
    const double rest = total - s;
    return {l + r * std::cos(rest / r), r * std::sin(rest / r)};
  };

  std::vector<double> arc(std::size_t(N + 1));
  for (int i = 0; i <= N; ++i) arc[std::size_t(i)] = total * double(i) / double(N);
  GeneratingCurve c;
  c.n = n;
  c.x.resize(N + 1);
  c.u.resize(N + 1);
  auto place = [&] {
    for (int i = 0; 2 * i <= N; ++i) {
      const Vec2 p = point(arc[std::size_t(i)]);
      c.x(i) = p.x();
      c.u(i) = p.y();
      c.x(N - i) = -p.x();
      c.u(N - i) = p.y();
    }
    c.u(0) = c.u(N) = 0.0;
    if (N % 2 == 0) c.x(N / 2) = 0.0;
  };
  place();

  // Same node distribution as resample(), with nodes kept on the exact curve.
  if (angle_weight > 0.0) {
    std::vector<Placement> targets;
    for (int pass = 0; pass < 64; ++pass) {
      place_nodes(arc_curve(c), angle_weight, targets);
      std::vector<double> next = arc;
      double moved = 0.0;
      for (int j = 1; j < N; ++j) {
        const Placement& pl = targets[std::size_t(j)];
        next[std::size_t(j)] = arc[pl.seg] + pl.t * (arc[pl.seg + 1] - arc[pl.seg]);
        moved = std::max(moved, std::abs(next[std::size_t(j)] - arc[std::size_t(j)]));
      }
      arc = std::move(next);
      place();
      if (moved <= 1e-14 * total) break;
    }
  }
  return c;
}

ShapeMetrics metrics(const GeneratingCurve& c) {
  const Eigen::Index last = c.segments();
  ShapeMetrics m;
  m.center = 0.5 * (c.x(0) + c.x(last));
  m.a = 0.5 * (c.x(last) - c.x(0));
  Eigen::Index imax = 0;
  c.u.maxCoeff(&imax);
  m.b = (imax > 0 && imax < last) ? parabolic_peak(c.u(imax - 1), c.u(imax), c.u(imax + 1))
                                  : c.u(imax);
  m.ratio = m.a / m.b;
  m.inner_est = 0.5 * m.b;
  m.outer_est = 2.0 * m.a;
  return m;
}

double support(const GeneratingCurve& c, const Eigen::Vector2d& z, bool recentre) {
  const Eigen::Index last = c.segments();
  const double shift = recentre ? 0.5 * (c.x(0) + c.x(last)) : 0.0;
  const double zr = std::abs(z.y());
  auto value = [&](Eigen::Index i) {
    const Vec2 p = extended_node(c, i);
    return (p.x() - shift) * z.x() + p.y() * zr;
  };
  Eigen::Index best = 0;
  double vbest = value(0);
  for (Eigen::Index i = 1; i <= last; ++i) {
    const double v = value(i);
    if (v > vbest) {
      vbest = v;
      best = i;
    }
  }
  return parabolic_peak(value(best - 1), vbest, value(best + 1));
}

Eigen::VectorXd arclength(const GeneratingCurve& c) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(c.nodes());
  for (Eigen::Index i = 1; i < c.nodes(); ++i) s(i) = s(i - 1) + (c.node(i) - c.node(i - 1)).norm();
  return s;
}

GeneratingCurve resample(const GeneratingCurve& input, double angle_weight, int max_passes) {
  validate(input);
  if (!(angle_weight >= 0.0)) throw BadParam("resample: angle_weight must be >= 0");
  const Eigen::Index last = input.segments();
  const double scale = curve_scale(input);
  GeneratingCurve c = input;
  std::vector<Placement> targets;
  for (int pass = 0; pass < max_passes; ++pass) {
    const ArcCurve ac = arc_curve(c);
    place_nodes(ac, angle_weight, targets);
    GeneratingCurve next = c;
    double moved = 0.0;
    for (Eigen::Index j = 1; j < last; ++j) {
      const Placement& pl = targets[std::size_t(j)];
      const Vec2 p = ac.eval(pl.seg, pl.t);
      moved = std::max(moved, (p - c.node(j)).norm());
      next.x(j) = p.x();
      next.u(j) = p.y();
    }
    for (Eigen::Index j = 1; j < last; ++j)
      if (!(next.u(j) > 0.0) || !(next.x(j) > next.x(j - 1)))
        throw DegenerateMesh("resample: interpolant folds near node " + std::to_string(j));
    c = std::move(next);
    if (moved <= 1e-13 * scale) break;
  }
  return c;
}

GeneratingCurve scaled(const GeneratingCurve& c, double factor, double center) {
  GeneratingCurve out = c;
  out.x = (c.x.array() - center) * factor;
  out.u = c.u * factor;
  return out;
}

double sphere_extinction_time(const SpeedSpec& speed, double R0) {
  const double a = speed.alpha();
  return std::pow(R0, 1 + a) / ((1 + a) * std::pow(double(speed.n()), a));
}

double exact_sphere_radius(const SpeedSpec& speed, double R0, double t) {
  if (!(R0 > 0.0)) throw BadParam("exact_sphere_radius: R0 must be positive");
  const double a = speed.alpha();
  const double T = sphere_extinction_time(speed, R0);
  if (t > T * (1 + 1e-12)) {
    std::ostringstream os;
    os << "sphere of radius " << R0 << " is extinct at t = " << T << " < " << t;
    throw PastSingular(os.str());
  }
  const double rest = std::pow(R0, 1 + a) * (1.0 - t / T);
  return rest <= 0.0 ? 0.0 : std::pow(rest, 1.0 / (1 + a));
}

double cylinder_extinction_time(const SpeedSpec& speed, double r0) {
  const double a = speed.alpha();
  const double f = speed.value(CurvatureVector{speed.n(), 0.0, 1.0});
  return std::pow(r0, 1 + a) / ((1 + a) * f);
}

double exact_cylinder_radius(const SpeedSpec& speed, double r0, double t) {
  if (!(r0 > 0.0)) throw BadParam("exact_cylinder_radius: r0 must be positive");
  const double a = speed.alpha();
  const double T = cylinder_extinction_time(speed, r0);
  if (t > T * (1 + 1e-12)) {
    std::ostringstream os;
    os << "cylinder of radius " << r0 << " is extinct at t = " << T << " < " << t;
    throw PastSingular(os.str());
  }
  const double rest = std::pow(r0, 1 + a) * (1.0 - t / T);
  return rest <= 0.0 ? 0.0 : std::pow(rest, 1.0 / (1 + a));
}

void write_curve_csv(std::ostream& os, const GeneratingCurve& c) {
  const CurveGeometry g = geometry(c);
  const Eigen::VectorXd s = arclength(c);
  os << "s,x,u,lambda,mu\n";
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < c.nodes(); ++i)
    os << s(i) << ',' << c.x(i) << ',' << c.u(i) << ',' << g.lambda(i) << ',' << g.mu(i)
       << '\n';
}

GeneratingCurve read_curve_csv(std::istream& is, int n) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("s,x,u,lambda,mu", 0) != 0)
    throw BadParam("curve csv: missing header s,x,u,lambda,mu");
  std::vector<double> xs, us;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 5) throw BadParam("curve csv: expected 5 columns");
    xs.push_back(vals[1]);
    us.push_back(vals[2]);
  }
  GeneratingCurve c;
  c.n = n;
  c.x = Eigen::Map<Eigen::VectorXd>(xs.data(), Eigen::Index(xs.size()));
  c.u = Eigen::Map<Eigen::VectorXd>(us.data(), Eigen::Index(us.size()));
  validate(c);
  return c;
}

}  // namespace axiflow
