#pragma once

#include <ostream>

#include "steklov/fem.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// Plain-text mesh dump: header, vertices, triangles (0-based), then boundary
/// edges in arclength order.
inline void write_mesh(const Mesh& mesh, std::ostream& os) {
  const auto old_precision = os.precision(17);
  os << "mesh " << domain_name(mesh.domain()) << ' ' << mesh.level() << '\n';
  for (const auto& v : mesh.vertices()) os << "v " << v.x << ' ' << v.y << '\n';
  for (const auto& t : mesh.triangles()) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& b : mesh.boundary_edges()) os << "b " << b.triangle << ' ' << b.local_edge << '\n';
  os.precision(old_precision);
}

/// Coordinate dump of the upper triangle.
inline void write_matrix(const SymSparse& m, std::ostream& os) {
  const Eigen::SparseMatrix<double> u = m.upper();
  const auto old_precision = os.precision(17);
  os << "matrix " << u.rows() << ' ' << u.nonZeros() << '\n';
  for (Eigen::Index c = 0; c < u.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(u, c); it; ++it)
      os << "e " << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  os.precision(old_precision);
}

} // namespace steklov
