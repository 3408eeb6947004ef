#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "axiflow/curvature.hpp"
#include "axiflow/speeds.hpp"

namespace axiflow {

/// Meridian curve of a rotationally symmetric hypersurface in R^{n+1}:
/// nodes (x_i, u_i), i = 0..N, from the left pole (u_0 = 0) over the
/// upper half-plane to the right pole (u_N = 0). The hypersurface is
/// {(x, u w) : w in S^{n-1}}.
struct GeneratingCurve {
  int n = 2;
  Eigen::VectorXd x;
  Eigen::VectorXd u;

  Eigen::Index segments() const { return x.size() - 1; }
  Eigen::Index nodes() const { return x.size(); }
  Eigen::Vector2d node(Eigen::Index i) const { return {x(i), u(i)}; }
};

/// Throws BadParam on broken pole conditions, non-positive interior radii or
/// non-increasing x; DegenerateMesh on coincident nodes.
void validate(const GeneratingCurve& curve);

/// Per-node curvatures together with the outward unit normal in the meridian
/// half-plane.
struct CurveGeometry {
  Eigen::ArrayXd lambda;
  Eigen::ArrayXd mu;
  Eigen::ArrayXd normal_x;
  Eigen::ArrayXd normal_u;

  CurvatureVector at(Eigen::Index i, int n) const { return {n, lambda(i), mu(i)}; }
};

/// Three-point circumcircle stencil (exact on circles). Poles use the mirror
/// image of their neighbour across the axis and are umbilic by construction.
/// Throws DegenerateMesh if adjacent nodes coincide within 1e-14 * scale.
CurveGeometry geometry(const GeneratingCurve& curve);

std::vector<CurvatureVector> curvatures_at(const GeneratingCurve& curve);

GeneratingCurve make_sphere(double R, int N, int n);

/// Cylinder of radius r over [-l, l] capped by hemispheres of radius r,
/// mirror-symmetric about x = 0. Nodes lie exactly on the curve, at equal
/// arclength for angle_weight = 0 and otherwise at the distribution
/// resample() converges to for the same weight.
GeneratingCurve make_spherocylinder(double l, double r, int N, int n, double angle_weight = 0.0);

struct ShapeMetrics {
  double a = 0;      ///< axial half-extent
  double b = 0;      ///< max distance from the axis
  double ratio = 0;  ///< a / b
  double inner_est = 0;  ///< b / 2: radius of an enclosed centred sphere
  double outer_est = 0;  ///< 2 a: radius of an enclosing centred sphere
  double center = 0;     ///< midpoint of the axial extent
};

/// Measured after recentring the axial extent at the origin.
ShapeMetrics metrics(const GeneratingCurve& curve);

/// Support function max <(x, u w), z> for the unit direction z = (zx, zr)
/// of the meridian plane (only |zr| matters by symmetry). Refined with a
/// parabola through the best node and its neighbours.
double support(const GeneratingCurve& curve, const Eigen::Vector2d& direction,
               bool recentre = true);

/// Redistributes interior nodes along an interpolant of the current nodes that
/// blends neighbouring circumcircle arcs (exact on circles and lines); poles
/// stay fixed. With angle_weight = 0 the nodes are
/// equally spaced in arclength; otherwise they equidistribute
/// ds / length + angle_weight * dtheta / total_turning, which keeps thin caps
/// resolved. Iterated until the output is a fixed point (at most
/// `max_passes` passes).
GeneratingCurve resample(const GeneratingCurve& curve, double angle_weight = 0.0,
                         int max_passes = 8);

/// Chord-length arclength parameter at every node, starting at 0.
Eigen::VectorXd arclength(const GeneratingCurve& curve);

/// Same geometry with lengths multiplied by `factor` about x = `center`.
GeneratingCurve scaled(const GeneratingCurve& curve, double factor, double center = 0.0);

/// Radius of the shrinking sphere that starts with radius R0 at time 0.
/// Throws PastSingular beyond the extinction time.
double exact_sphere_radius(const SpeedSpec& speed, double R0, double t);
double sphere_extinction_time(const SpeedSpec& speed, double R0);

/// Radius of the shrinking round cylinder R x S^{n-1} starting at r0.
double exact_cylinder_radius(const SpeedSpec& speed, double r0, double t);
double cylinder_extinction_time(const SpeedSpec& speed, double r0);

/// CSV with header `s,x,u,lambda,mu`.
void write_curve_csv(std::ostream& os, const GeneratingCurve& curve);
GeneratingCurve read_curve_csv(std::istream& is, int n);

}  // namespace axiflow
