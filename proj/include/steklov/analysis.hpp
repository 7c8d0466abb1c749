#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steklov/errors.hpp"
#include "steklov/fem.hpp"
#include "steklov/interp.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// A discrete function: DOF vector plus the mesh and numbering it lives on.
struct FeFunction {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DofMap> dofmap;
  Eigen::VectorXd values;

  double operator()(int tri, const Barycentric& b) const { return evaluate_fe(values, *dofmap, tri, b); }

  FeFunction operator-() const { return {mesh, dofmap, -values}; }
};

inline double boundary_l2_norm(const Mesh& mesh, const PointFunction& f) {
  double s = 0.0;
  for (const auto& be : mesh.boundary_edges()) {
    auto [a, b] = mesh.edge_vertices(be.triangle, be.local_edge);
    const Point pa = mesh.vertices()[a], pb = mesh.vertices()[b];
    const double len = distance(pa, pb);
    for (double t : kEdgeGauss) {
      const double v = f((1.0 - t) * pa + t * pb, mesh.triangle_side(be.triangle));
      s += 0.5 * len * v * v;
    }
  }
  return std::sqrt(s);
}

/// Exact for FE traces, which are linear on each boundary edge.
inline double boundary_l2_norm(const FeFunction& f) {
  double s = 0.0;
  const Mesh& mesh = *f.mesh;
  for (const auto& be : mesh.boundary_edges()) {
    const double len = mesh.edge_length(be.triangle, be.local_edge);
    for (double t : kEdgeGauss) {
      const double v = f(be.triangle, edge_point(be.local_edge, t));
      s += 0.5 * len * v * v;
    }
  }
  return std::sqrt(s);
}

/// Elementwise H1 norm summed over triangles.
inline double broken_h1_norm(const FeFunction& f) {
  const Mesh& mesh = *f.mesh;
  const DofMap& dm = *f.dofmap;
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto grad = shape_gradients(dm.family, mesh.corners(t));
    const auto& d = dm.cell_dofs[t];
    Point g{0.0, 0.0};
    for (int i = 0; i < 3; ++i) g = g + f.values[d[i]] * grad[i];
    const double area = mesh.area(t);
    double l2 = 0.0;
    for (const auto& q : kTriangleQuadrature) {
      const double v = f(t, q);
      l2 += area / 3.0 * v * v;
    }
    s += area * dot(g, g) + l2;
  }
  return std::sqrt(s);
}

/// A fine-mesh FE function made evaluable on a coarser ancestor mesh. Points
/// of a coarse triangle are routed to the containing fine triangle by walking
/// down the parent/child links of the refinement chain, so no interpolation
/// happens on the way.
class TransferredReference {
public:
  TransferredReference(FeFunction fine, std::vector<Refinement> chain, std::shared_ptr<const Mesh> coarse)
      : fine_(std::move(fine)), chain_(std::move(chain)), coarse_(std::move(coarse)) {
    auto same = [](const Mesh& a, const Mesh& b) {
      return &a == &b || (a.domain() == b.domain() && a.level() == b.level());
    };
    if (chain_.empty()) {
      if (!same(*coarse_, *fine_.mesh)) throw NestingError("no refinement chain between different meshes");
    } else {
      if (!same(*chain_.front().coarse, *coarse_)) throw NestingError("chain does not start at the coarse mesh");
      if (!same(*chain_.back().fine, *fine_.mesh)) throw NestingError("chain does not end at the fine mesh");
      for (std::size_t k = 1; k < chain_.size(); ++k)
        if (!same(*chain_[k - 1].fine, *chain_[k].coarse)) throw NestingError("refinement chain is broken");
    }
    children_.resize(chain_.size());
    for (std::size_t k = 0; k < chain_.size(); ++k) {
      auto& ch = children_[k];
      ch.assign(static_cast<std::size_t>(chain_[k].coarse->num_triangles()) * 4, -1);
      std::vector<int> fill(chain_[k].coarse->num_triangles(), 0);
      for (int t = 0; t < static_cast<int>(chain_[k].parent_of.size()); ++t) {
        const int p = chain_[k].parent_of[t];
        if (fill[p] >= 4) throw NestingError("coarse triangle with more than four children");
        ch[static_cast<std::size_t>(p) * 4 + fill[p]++] = t;
      }
    }
  }

  const Mesh& coarse_mesh() const { return *coarse_; }
  const FeFunction& fine_function() const { return fine_; }

  /// Fine boundary edges per coarse boundary edge.
  int subdivisions() const { return 1 << chain_.size(); }

  double at(int coarse_tri, const Barycentric& b) const {
    int tri = coarse_tri;
    const Mesh* mesh = coarse_.get();
    const Point p = mesh->point(tri, b);
    Barycentric lam = b;
    for (std::size_t k = 0; k < chain_.size(); ++k) {
      const Mesh& fine = *chain_[k].fine;
      int best = -1;
      double best_min = -1e300;
      for (int c = 0; c < 4; ++c) {
        const int child = children_[k][static_cast<std::size_t>(tri) * 4 + c];
        if (child < 0) continue;
        const Barycentric cb = fine.barycentric(child, p);
        const double m = std::min({cb[0], cb[1], cb[2]});
        if (m > best_min) {
          best_min = m;
          best = child;
          lam = cb;
        }
      }
      if (best < 0 || best_min < -1e-9) throw NestingError("point not covered by any child triangle");
      tri = best;
    }
    for (double& l : lam) l = std::max(l, 0.0);
    return fine_(tri, lam);
  }

private:
  FeFunction fine_;
  std::vector<Refinement> chain_;
  std::shared_ptr<const Mesh> coarse_;
  std::vector<std::vector<int>> children_;
};

/// `chain` must lead from `coarse_mesh` to the mesh of `fine`.
inline TransferredReference transfer_reference(FeFunction fine, std::vector<Refinement> chain,
                                               std::shared_ptr<const Mesh> coarse_mesh) {
  return TransferredReference(std::move(fine), std::move(chain), std::move(coarse_mesh));
}

namespace detail {

/// Integrates op(u, ref) over the boundary on the fine partition, where both
/// traces are linear; two-point Gauss is then exact for products.
template <typename Op>
double boundary_integral(const FeFunction& u, const TransferredReference& ref, Op op) {
  const Mesh& mesh = *u.mesh;
  if (mesh.domain() != ref.coarse_mesh().domain() || mesh.level() != ref.coarse_mesh().level())
    throw NestingError("function and reference live on different coarse meshes");
  const int m = ref.subdivisions();
  double s = 0.0;
  for (const auto& be : mesh.boundary_edges()) {
    const double len = mesh.edge_length(be.triangle, be.local_edge) / m;
    for (int k = 0; k < m; ++k)
      for (double g : kEdgeGauss) {
        const Barycentric b = edge_point(be.local_edge, (k + g) / m);
        s += 0.5 * len * op(u(be.triangle, b), ref.at(be.triangle, b));
      }
  }
  return s;
}

} // namespace detail

inline double boundary_inner(const FeFunction& u, const TransferredReference& ref) {
  return detail::boundary_integral(u, ref, [](double a, double b) { return a * b; });
}

inline double boundary_l2_error(const FeFunction& u, const TransferredReference& ref) {
  return std::sqrt(detail::boundary_integral(u, ref, [](double a, double b) { return (a - b) * (a - b); }));
}

/// Two functions on the same mesh.
inline double boundary_l2_error(const FeFunction& u, const FeFunction& v) {
  return boundary_l2_error(u, transfer_reference(v, {}, u.mesh));
}

inline FeFunction align_sign(const FeFunction& u, const TransferredReference& ref) {
  const double ip = boundary_inner(u, ref);
  if (std::abs(ip) < 1e-12)
    throw AmbiguousAlignment("boundary inner product with the reference vanishes; eigenpairs do not match");
  return ip >= 0.0 ? u : -u;
}

inline FeFunction align_sign(const FeFunction& u, const FeFunction& ref) {
  return align_sign(u, transfer_reference(ref, {}, u.mesh));
}

inline FeFunction align_sign(const FeFunction& u, const PointFunction& ref) {
  const Mesh& mesh = *u.mesh;
  double ip = 0.0;
  for (const auto& be : mesh.boundary_edges()) {
    const double len = mesh.edge_length(be.triangle, be.local_edge);
    for (double t : kEdgeGauss) {
      const Barycentric b = edge_point(be.local_edge, t);
      ip += 0.5 * len * u(be.triangle, b) * ref(mesh.point(be.triangle, b), mesh.triangle_side(be.triangle));
    }
  }
  if (std::abs(ip) < 1e-12)
    throw AmbiguousAlignment("boundary inner product with the reference vanishes; eigenpairs do not match");
  return ip >= 0.0 ? u : -u;
}

/// ||u - f||_{0,boundary} for a point function f, by two-point Gauss on
/// `subdivisions` equal pieces of every boundary edge.
inline double boundary_l2_error(const FeFunction& u, const PointFunction& f, int subdivisions = 16) {
  const Mesh& mesh = *u.mesh;
  double s = 0.0;
  for (const auto& be : mesh.boundary_edges()) {
    const double len = mesh.edge_length(be.triangle, be.local_edge) / subdivisions;
    const SlitSide side = mesh.triangle_side(be.triangle);
    for (int k = 0; k < subdivisions; ++k)
      for (double g : kEdgeGauss) {
        const Barycentric b = edge_point(be.local_edge, (k + g) / subdivisions);
        const double d = u(be.triangle, b) - f(mesh.point(be.triangle, b), side);
        s += 0.5 * len * d * d;
      }
  }
  return std::sqrt(s);
}

/// Observed order under mesh halving: log2(coarse / fine).
inline double convergence_ratio(double coarse_err, double fine_err) {
  if (!(coarse_err > 0.0) || !(fine_err > 0.0))
    throw UndefinedRatio("convergence ratio needs positive errors");
  return std::log2(coarse_err / fine_err);
}

} // namespace steklov
