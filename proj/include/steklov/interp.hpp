#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "steklov/fem.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// A function on the closed domain. On the slit of SlitSquare the side flag
/// selects which one-sided limit to return; elsewhere it is ignored.
class PointFunction {
public:
  using Sided = std::function<double(Point, SlitSide)>;

  PointFunction(std::function<double(Point)> f)
      : f_([g = std::move(f)](Point p, SlitSide) { return g(p); }) {}
  PointFunction(Sided f) : f_(std::move(f)) {}

  double operator()(Point p, SlitSide side = SlitSide::None) const { return f_(p, side); }

private:
  Sided f_;
};

/// Mean of f over the segment a->b by two-point Gauss (exact for cubics).
inline double edge_mean(const PointFunction& f, Point a, Point b, SlitSide side) {
  double s = 0.0;
  for (double t : kEdgeGauss) s += 0.5 * f((1.0 - t) * a + t * b, side);
  return s;
}

/// Crouzeix-Raviart interpolant: each DOF is the mean of f over its edge.
inline Eigen::VectorXd interpolate_cr(const Mesh& mesh, const DofMap& dm, const PointFunction& f) {
  if (dm.family != Family::CR) throw Error("interpolate_cr needs a CR dof map");
  Eigen::VectorXd u(dm.n_dofs);
  for (int d = 0; d < dm.n_dofs; ++d) {
    const auto& own = dm.dof_owner[d];
    auto [a, b] = mesh.edge_vertices(own.triangle, own.local_edge);
    u[d] = edge_mean(f, mesh.vertices()[a], mesh.vertices()[b], mesh.triangle_side(own.triangle));
  }
  return u;
}

inline Eigen::VectorXd interpolate_p1(const Mesh& mesh, const DofMap& dm, const PointFunction& f) {
  if (dm.family != Family::P1) throw Error("interpolate_p1 needs a P1 dof map");
  Eigen::VectorXd u(dm.n_dofs);
  for (int v = 0; v < mesh.num_vertices(); ++v) u[v] = f(mesh.vertices()[v], mesh.vertex_side(v));
  return u;
}

inline Eigen::VectorXd interpolate(const Mesh& mesh, const DofMap& dm, const PointFunction& f) {
  return dm.family == Family::P1 ? interpolate_p1(mesh, dm, f) : interpolate_cr(mesh, dm, f);
}

/// Piecewise-constant boundary interpolant, one mean per boundary edge in
/// boundary order.
inline std::vector<double> interpolate_boundary_constant(const Mesh& mesh, const PointFunction& g) {
  std::vector<double> out;
  out.reserve(mesh.boundary_edges().size());
  for (const auto& be : mesh.boundary_edges()) {
    auto [a, b] = mesh.edge_vertices(be.triangle, be.local_edge);
    out.push_back(edge_mean(g, mesh.vertices()[a], mesh.vertices()[b], mesh.triangle_side(be.triangle)));
  }
  return out;
}

/// Same, for a boundary function given in terms of arclength.
inline std::vector<double> interpolate_boundary_constant(const Mesh& mesh,
                                                         const std::function<double(double)>& g_of_s) {
  std::vector<double> out;
  for (const auto& e : boundary_arclength_order(mesh)) {
    double s = 0.0;
    for (double t : kEdgeGauss) s += 0.5 * g_of_s(e.start + t * (e.end - e.start));
    out.push_back(s);
  }
  return out;
}

/// rho^{pi/omega} cos(pi theta / omega) around the re-entrant corner at
/// (1/2, 1/2), with theta measured counterclockwise from one boundary ray
/// through the domain:
///   LShape: theta = 0 on the ray going up from the corner, 3pi/2 on the ray
///           going right.
///   SlitSquare: theta = 0 on the upper side of the slit, 2pi on the lower.
/// Points exactly on the slit with no side given take the upper value.
inline PointFunction singular_model(Domain domain) {
  if (domain == Domain::UnitSquare) throw UnsupportedDomain("singular model needs a re-entrant corner");
  const double omega = largest_angle(domain);
  const double exponent = std::numbers::pi / omega;
  return PointFunction(PointFunction::Sided([domain, omega, exponent](Point p, SlitSide side) {
    const double dx = p.x - 0.5, dy = p.y - 0.5;
    const double rho = std::hypot(dx, dy);
    if (rho == 0.0) return 0.0;
    double theta = std::atan2(dy, dx); // (-pi, pi]
    if (domain == Domain::LShape) {
      if (theta <= 0.0) theta += 2.0 * std::numbers::pi;
      theta -= 0.5 * std::numbers::pi;
    } else {
      if (theta < 0.0 || (theta == 0.0 && side == SlitSide::Lower)) theta += 2.0 * std::numbers::pi;
    }
    return std::pow(rho, exponent) * std::cos(std::numbers::pi * theta / omega);
  }));
}

} // namespace steklov
