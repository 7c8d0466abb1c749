#pragma once

#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "steklov/errors.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

enum class Family { P1, CR };

inline std::string_view family_name(Family f) { return f == Family::P1 ? "p1" : "cr"; }

inline Family parse_family(std::string_view s) {
  if (s == "p1") return Family::P1;
  if (s == "cr") return Family::CR;
  throw Error("unknown element '" + std::string(s) + "' (expected p1 or cr)");
}

/// Global numbering of the degrees of freedom. For P1 cell_dofs follows the
/// triangle's vertex order; for CR, local DOF k sits on the edge opposite
/// local vertex k.
struct DofMap {
  Family family = Family::P1;
  int n_dofs = 0;
  std::vector<std::array<int, 3>> cell_dofs;
  /// Sorted, unique.
  std::vector<int> boundary_dofs;
  /// CR only: one (triangle, local edge) owner per DOF, used to evaluate
  /// edge quantities on the correct slit side.
  std::vector<BoundaryEdge> dof_owner;
};

inline DofMap build_dof_map(const Mesh& mesh, Family family) {
  DofMap dm;
  dm.family = family;
  const int nt = mesh.num_triangles();
  dm.cell_dofs.resize(nt);
  std::vector<char> on_boundary;

  if (family == Family::P1) {
    dm.n_dofs = mesh.num_vertices();
    for (int t = 0; t < nt; ++t) dm.cell_dofs[t] = mesh.triangles()[t];
    on_boundary.assign(dm.n_dofs, 0);
    for (const auto& be : mesh.boundary_edges()) {
      auto [a, b] = mesh.edge_vertices(be.triangle, be.local_edge);
      on_boundary[a] = on_boundary[b] = 1;
    }
  } else {
    // Edges are numbered lexicographically by their sorted vertex pair. Slit
    // vertices are already duplicated, so the two slit sides get distinct edges.
    std::map<std::pair<int, int>, int> edge_id;
    for (int t = 0; t < nt; ++t)
      for (int e = 0; e < 3; ++e) {
        auto [a, b] = mesh.edge_vertices(t, e);
        edge_id.emplace(std::pair{std::min(a, b), std::max(a, b)}, 0);
      }
    int next = 0;
    for (auto& [key, id] : edge_id) id = next++;
    dm.n_dofs = next;
    dm.dof_owner.assign(dm.n_dofs, BoundaryEdge{-1, -1, 0});
    for (int t = 0; t < nt; ++t)
      for (int e = 0; e < 3; ++e) {
        auto [a, b] = mesh.edge_vertices(t, e);
        const int id = edge_id.at({std::min(a, b), std::max(a, b)});
        dm.cell_dofs[t][e] = id;
        if (dm.dof_owner[id].triangle < 0) dm.dof_owner[id] = {t, e, 0};
      }
    // Every DOF of a triangle touching the boundary has a nonzero trace there.
    on_boundary.assign(dm.n_dofs, 0);
    for (const auto& be : mesh.boundary_edges())
      for (int d : dm.cell_dofs[be.triangle]) on_boundary[d] = 1;
  }

  for (int d = 0; d < dm.n_dofs; ++d)
    if (on_boundary[d]) dm.boundary_dofs.push_back(d);
  return dm;
}

struct CoefficientField {
  std::function<double(Point)> alpha = [](Point) { return 1.0; };
  std::function<double(Point)> beta = [](Point) { return 1.0; };

  static CoefficientField constant(double alpha, double beta) {
    return {[alpha](Point) { return alpha; }, [beta](Point) { return beta; }};
  }

  /// alpha(x) = c0 + c1 x1 + c2 x2, beta constant.
  static CoefficientField affine_alpha(std::array<double, 3> c, double beta) {
    return {[c](Point p) { return c[0] + c[1] * p.x + c[2] * p.y; }, [beta](Point) { return beta; }};
  }
};

/// Symmetric sparse matrix. Stored in full (both triangles) so products and
/// factorizations can use it directly; the upper triangle is assembled first
/// and mirrored, which makes the symmetry exact.
struct SymSparse {
  Eigen::SparseMatrix<double> full;

  Eigen::Index dimension() const { return full.rows(); }

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return full * x; }

  Eigen::SparseMatrix<double> upper() const { return full.triangularView<Eigen::Upper>(); }

  static SymSparse from_upper_triplets(Eigen::Index n, const std::vector<Eigen::Triplet<double>>& upper) {
    Eigen::SparseMatrix<double> u(n, n);
    u.setFromTriplets(upper.begin(), upper.end());
    SymSparse s;
    s.full = u;
    s.full += Eigen::SparseMatrix<double>(u.triangularView<Eigen::StrictlyUpper>().transpose());
    s.full.makeCompressed();
    return s;
  }
};

// ---------------------------------------------------------------------------
// Local bases

/// Values of the three local basis functions at a barycentric point.
inline std::array<double, 3> shape_values(Family family, const Barycentric& b) {
  if (family == Family::P1) return b;
  return {1.0 - 2.0 * b[0], 1.0 - 2.0 * b[1], 1.0 - 2.0 * b[2]};
}

inline std::array<Point, 3> shape_gradients(Family family, const std::array<Point, 3>& v) {
  const double twice_area = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
  std::array<Point, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point& a = v[(i + 1) % 3];
    const Point& b = v[(i + 2) % 3];
    g[i] = {(a.y - b.y) / twice_area, (b.x - a.x) / twice_area};
  }
  if (family == Family::CR)
    for (auto& gi : g) gi = -2.0 * gi;
  return g;
}

/// Edge-midpoint rule, exact for quadratics. Weights are area/3.
inline constexpr std::array<Barycentric, 3> kTriangleQuadrature{
    Barycentric{0.0, 0.5, 0.5}, Barycentric{0.5, 0.0, 0.5}, Barycentric{0.5, 0.5, 0.0}};

/// Two-point Gauss on [0,1], weights 1/2 each.
inline const std::array<double, 2> kEdgeGauss{0.5 - 0.5 / std::numbers::sqrt3, 0.5 + 0.5 / std::numbers::sqrt3};

/// Barycentric coordinates of the point at parameter t along local edge e,
/// following the edge's counterclockwise orientation.
inline Barycentric edge_point(int local_edge, double t) {
  Barycentric b{0.0, 0.0, 0.0};
  b[(local_edge + 1) % 3] = 1.0 - t;
  b[(local_edge + 2) % 3] = t;
  return b;
}

inline Point physical(const std::array<Point, 3>& v, const Barycentric& b) {
  return {b[0] * v[0].x + b[1] * v[1].x + b[2] * v[2].x, b[0] * v[0].y + b[1] * v[1].y + b[2] * v[2].y};
}

inline double checked(double value, const char* name, Point p) {
  if (!(value > 0.0))
    throw InvalidCoefficient(std::string(name) + " must be positive, got " + std::to_string(value) + " at (" +
                             std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
  return value;
}

/// Element matrix of  int_K alpha grad(phi_i).grad(phi_j) + beta phi_i phi_j.
/// Either coefficient may be empty to drop its term.
inline Eigen::Matrix3d local_stiffness(Family family, const std::array<Point, 3>& v,
                                       const std::function<double(Point)>& alpha,
                                       const std::function<double(Point)>& beta) {
  const double area =
      0.5 * ((v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y));
  const auto grad = shape_gradients(family, v);
  Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
  for (const auto& q : kTriangleQuadrature) {
    const Point x = physical(v, q);
    const double w = area / 3.0;
    const auto phi = shape_values(family, q);
    const double a = alpha ? checked(alpha(x), "alpha", x) : 0.0;
    const double c = beta ? checked(beta(x), "beta", x) : 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k(i, j) += w * (a * dot(grad[i], grad[j]) + c * phi[i] * phi[j]);
  }
  return k;
}

namespace detail {

inline void add_symmetric(std::vector<Eigen::Triplet<double>>& trips, const std::array<int, 3>& dofs,
                          const Eigen::Matrix3d& k, int skip = -1) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == skip || j == skip) continue;
      const int r = dofs[i], c = dofs[j];
      if (r <= c) trips.emplace_back(r, c, k(i, j));
    }
}

inline SymSparse assemble_cells(const Mesh& mesh, const DofMap& dm, const std::function<double(Point)>& alpha,
                                const std::function<double(Point)>& beta) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 6);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    add_symmetric(trips, dm.cell_dofs[t], local_stiffness(dm.family, mesh.corners(t), alpha, beta));
  return SymSparse::from_upper_triplets(dm.n_dofs, trips);
}

} // namespace detail

/// Matrix of a_h(u, v) = sum_K int_K (alpha grad u . grad v + beta u v).
inline SymSparse assemble_stiffness(const Mesh& mesh, const DofMap& dm, const CoefficientField& coeff) {
  if (!coeff.alpha || !coeff.beta) throw InvalidCoefficient("both alpha and beta are required");
  return detail::assemble_cells(mesh, dm, coeff.alpha, coeff.beta);
}

/// Weighted domain mass matrix int_Omega w u v.
inline SymSparse assemble_mass(const Mesh& mesh, const DofMap& dm, const std::function<double(Point)>& weight) {
  return detail::assemble_cells(mesh, dm, nullptr, weight);
}

/// Element contribution of b(u, v) on one boundary edge, indexed by local DOF.
inline Eigen::Matrix3d local_boundary_mass(Family family, int local_edge, double length) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (double t : kEdgeGauss) {
    const auto phi = shape_values(family, edge_point(local_edge, t));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) += 0.5 * length * phi[i] * phi[j];
  }
  return m;
}

/// Matrix of b(u, v) = int_{boundary} u v ds.
inline SymSparse assemble_boundary_mass(const Mesh& mesh, const DofMap& dm) {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& be : mesh.boundary_edges()) {
    const auto m = local_boundary_mass(dm.family, be.local_edge, mesh.edge_length(be.triangle, be.local_edge));
    // P1: the vertex opposite the edge has zero trace
    detail::add_symmetric(trips, dm.cell_dofs[be.triangle], m, dm.family == Family::P1 ? be.local_edge : -1);
  }
  return SymSparse::from_upper_triplets(dm.n_dofs, trips);
}

inline double evaluate_fe(const Eigen::VectorXd& u, const DofMap& dm, int tri, const Barycentric& b) {
  if (tri < 0 || tri >= static_cast<int>(dm.cell_dofs.size()))
    throw Error("triangle index " + std::to_string(tri) + " out of range");
  const auto phi = shape_values(dm.family, b);
  const auto& d = dm.cell_dofs[tri];
  return phi[0] * u[d[0]] + phi[1] * u[d[1]] + phi[2] * u[d[2]];
}

/// Dimension of the space of boundary traces, from the combinatorics of the
/// DOF map alone. On each boundary edge the trace is linear and is fixed by
/// two functionals: point values at both ends (P1), or the edge DOF together
/// with the difference of the other two (CR). Values of the form e_i ground a
/// DOF; differences e_i - e_j link two. The rank of such a family is the
/// number of touched DOFs minus the number of ungrounded linked components.
inline int boundary_trace_rank(const Mesh& mesh, const DofMap& dm) {
  const int ground = dm.n_dofs;
  std::vector<int> parent(dm.n_dofs + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<char> touched(dm.n_dofs + 1, 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) {
    touched[a] = touched[b] = 1;
    parent[find(a)] = find(b);
  };
  for (const auto& be : mesh.boundary_edges()) {
    const auto& d = dm.cell_dofs[be.triangle];
    const int e = be.local_edge;
    if (dm.family == Family::P1) {
      unite(d[(e + 1) % 3], ground);
      unite(d[(e + 2) % 3], ground);
    } else {
      unite(d[e], ground);
      unite(d[(e + 1) % 3], d[(e + 2) % 3]);
    }
  }
  int rank = 0;
  for (int x = 0; x < dm.n_dofs; ++x)
    if (touched[x]) ++rank;
  for (int x = 0; x < dm.n_dofs; ++x)
    if (touched[x] && find(x) == x && find(x) != find(ground)) --rank;
  return rank;
}

} // namespace steklov
