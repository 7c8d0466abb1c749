#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "steklov/errors.hpp"

namespace steklov {

enum class Domain { UnitSquare, LShape, SlitSquare };

inline std::string_view domain_name(Domain d) {
  switch (d) {
  case Domain::UnitSquare: return "square";
  case Domain::LShape: return "lshape";
  case Domain::SlitSquare: return "slit";
  }
  return "?";
}

inline Domain parse_domain(std::string_view s) {
  if (s == "square") return Domain::UnitSquare;
  if (s == "lshape") return Domain::LShape;
  if (s == "slit") return Domain::SlitSquare;
  throw Error("unknown domain '" + std::string(s) + "' (expected square, lshape or slit)");
}

/// Regularity exponent used for rate predictions: 1 on convex domains,
/// pi/omega at the re-entrant corner otherwise.
inline double expected_r(Domain d) {
  switch (d) {
  case Domain::UnitSquare: return 1.0;
  case Domain::LShape: return 2.0 / 3.0;
  case Domain::SlitSquare: return 0.5;
  }
  return 1.0;
}

/// Largest interior angle.
inline double largest_angle(Domain d) {
  switch (d) {
  case Domain::UnitSquare: return std::numbers::pi / 2;
  case Domain::LShape: return 1.5 * std::numbers::pi;
  case Domain::SlitSquare: return 2.0 * std::numbers::pi;
  }
  return std::numbers::pi / 2;
}

inline double domain_area(Domain d) { return d == Domain::LShape ? 0.75 : 1.0; }

/// Boundary length; both sides of the slit count.
inline double domain_perimeter(Domain d) { return d == Domain::SlitSquare ? 5.0 : 4.0; }

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

using Barycentric = std::array<double, 3>;
using Triangle = std::array<int, 3>;

/// Which copy of the slit a point or vertex belongs to. Only meaningful on
/// the slit segment of SlitSquare.
enum class SlitSide { None, Lower, Upper };

/// Local edge k of a triangle is the edge opposite local vertex k, traversed
/// from vertex (k+1)%3 to (k+2)%3 (counterclockwise).
struct BoundaryEdge {
  int triangle = 0;
  int local_edge = 0;
  int component = 0;
};

class Mesh;
Mesh generate_mesh(Domain domain, int level);

/// Uniform right-isosceles triangulation of one of the study domains. Each
/// grid square is cut by its lower-left to upper-right diagonal. Immutable
/// once generated.
class Mesh {
public:
  Domain domain() const noexcept { return domain_; }
  int level() const noexcept { return level_; }
  double grid_step() const noexcept { return 1.0 / level_; }
  double h() const noexcept { return std::numbers::sqrt2 / level_; }

  std::span<const Point> vertices() const noexcept { return vertices_; }
  std::span<const Triangle> triangles() const noexcept { return triangles_; }
  /// Counterclockwise from the origin; a single curve, the slit included.
  std::span<const BoundaryEdge> boundary_edges() const noexcept { return boundary_; }

  int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
  int num_triangles() const noexcept { return static_cast<int>(triangles_.size()); }

  std::array<Point, 3> corners(int tri) const {
    const auto& t = triangles_[tri];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
  }

  std::pair<int, int> edge_vertices(int tri, int local_edge) const {
    const auto& t = triangles_[tri];
    return {t[(local_edge + 1) % 3], t[(local_edge + 2) % 3]};
  }

  double edge_length(int tri, int local_edge) const {
    auto [a, b] = edge_vertices(tri, local_edge);
    return distance(vertices_[a], vertices_[b]);
  }

  double area(int tri) const {
    auto [p0, p1, p2] = corners(tri);
    return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
  }

  Point point(int tri, const Barycentric& b) const {
    auto [p0, p1, p2] = corners(tri);
    return {b[0] * p0.x + b[1] * p1.x + b[2] * p2.x, b[0] * p0.y + b[1] * p1.y + b[2] * p2.y};
  }

  Barycentric barycentric(int tri, Point p) const {
    auto [p0, p1, p2] = corners(tri);
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    const double l1 = ((p.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p.y - p0.y)) / det;
    const double l2 = ((p1.x - p0.x) * (p.y - p0.y) - (p.x - p0.x) * (p1.y - p0.y)) / det;
    return {1.0 - l1 - l2, l1, l2};
  }

  SlitSide triangle_side(int tri) const {
    if (domain_ != Domain::SlitSquare) return SlitSide::None;
    return triangle_row_[tri] >= level_ / 2 ? SlitSide::Upper : SlitSide::Lower;
  }

  SlitSide vertex_side(int v) const { return vertex_side_.empty() ? SlitSide::None : vertex_side_[v]; }

  /// Triangle containing p (closed), or -1 when p lies outside the domain.
  /// On the slit, `side` picks the copy; Lower is used unless Upper is asked for.
  int locate(Point p, SlitSide side = SlitSide::None) const {
    const double n = level_;
    if (p.x < -1e-12 || p.y < -1e-12 || p.x > 1 + 1e-12 || p.y > 1 + 1e-12) return -1;
    const int i0 = std::clamp(static_cast<int>(std::floor(p.x * n)), 0, level_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor(p.y * n)), 0, level_ - 1);
    // Points on a grid line may belong to the square below or to the left.
    std::array<int, 2> is{i0, p.x * n == i0 && i0 > 0 ? i0 - 1 : -1};
    std::array<int, 2> js{j0, p.y * n == j0 && j0 > 0 ? j0 - 1 : -1};
    if (domain_ == Domain::SlitSquare && p.y == 0.5 && p.x > 0.5)
      js = side == SlitSide::Upper ? std::array<int, 2>{level_ / 2, -1} : std::array<int, 2>{level_ / 2 - 1, -1};
    for (int j : js)
      for (int i : is) {
        if (i < 0 || j < 0) continue;
        const double dx = p.x * n - i;
        const double dy = p.y * n - j;
        const int tri = square_triangles_[(static_cast<std::size_t>(j) * level_ + i) * 2 + (dy <= dx ? 0 : 1)];
        if (tri >= 0) return tri;
      }
    return -1;
  }

private:
  friend Mesh generate_mesh(Domain domain, int level);

  Domain domain_ = Domain::UnitSquare;
  int level_ = 0;
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<SlitSide> vertex_side_;
  std::vector<int> triangle_row_;
  // two entries per grid square (lower, upper), -1 outside the domain
  std::vector<int> square_triangles_;
};

inline Mesh generate_mesh(Domain domain, int level) {
  if (level < 2) throw InvalidLevel("mesh level must be at least 2, got " + std::to_string(level));
  if (domain != Domain::UnitSquare && level % 2 != 0)
    throw InvalidLevel("mesh level must be even for " + std::string(domain_name(domain)) + ", got " +
                       std::to_string(level));

  const int n = level;
  const int mid = n / 2;
  auto square_inside = [&](int i, int j) {
    return !(domain == Domain::LShape && i >= mid && j >= mid);
  };
  auto vertex_inside = [&](int i, int j) {
    return !(domain == Domain::LShape && i > mid && j > mid);
  };

  Mesh m;
  m.domain_ = domain;
  m.level_ = n;

  std::vector<int> id(static_cast<std::size_t>(n + 1) * (n + 1), -1);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (vertex_inside(i, j)) {
        id[static_cast<std::size_t>(j) * (n + 1) + i] = static_cast<int>(m.vertices_.size());
        m.vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      }

  const bool slit = domain == Domain::SlitSquare;
  std::vector<int> upper_id(n + 1, -1);
  if (slit) {
    m.vertex_side_.assign(m.vertices_.size(), SlitSide::None);
    for (int i = mid + 1; i <= n; ++i) {
      m.vertex_side_[id[static_cast<std::size_t>(mid) * (n + 1) + i]] = SlitSide::Lower;
      upper_id[i] = static_cast<int>(m.vertices_.size());
      m.vertices_.push_back({static_cast<double>(i) / n, 0.5});
      m.vertex_side_.push_back(SlitSide::Upper);
    }
  }

  // (i, j) is a grid corner of the square in row `row`
  auto vertex = [&](int i, int j, int row) {
    if (slit && j == mid && i > mid && row == mid) return upper_id[i];
    return id[static_cast<std::size_t>(j) * (n + 1) + i];
  };

  m.square_triangles_.assign(static_cast<std::size_t>(n) * n * 2, -1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!square_inside(i, j)) continue;
      const int v00 = vertex(i, j, j), v10 = vertex(i + 1, j, j);
      const int v11 = vertex(i + 1, j + 1, j), v01 = vertex(i, j + 1, j);
      const std::size_t sq = static_cast<std::size_t>(j) * n + i;
      m.square_triangles_[2 * sq] = static_cast<int>(m.triangles_.size());
      m.triangles_.push_back({v00, v10, v11});
      m.triangle_row_.push_back(j);
      m.square_triangles_[2 * sq + 1] = static_cast<int>(m.triangles_.size());
      m.triangles_.push_back({v00, v11, v01});
      m.triangle_row_.push_back(j);
    }

  // Boundary edges are the edges owned by a single triangle; their local
  // orientation already has the domain on the left.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : m.triangles_)
    for (int e = 0; e < 3; ++e) {
      int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  std::vector<BoundaryEdge> outgoing(m.vertices_.size(), BoundaryEdge{-1, -1, 0});
  std::size_t n_boundary = 0;
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e) {
      auto [a, b] = m.edge_vertices(t, e);
      if (edge_count[{std::min(a, b), std::max(a, b)}] != 1) continue;
      if (outgoing[a].triangle != -1) throw Error("mesh boundary is not a simple curve");
      outgoing[a] = {t, e, 0};
      ++n_boundary;
    }

  const int start = id[0];
  int v = start;
  do {
    const BoundaryEdge be = outgoing[v];
    if (be.triangle < 0) throw Error("mesh boundary chain is broken");
    m.boundary_.push_back(be);
    v = m.edge_vertices(be.triangle, be.local_edge).second;
  } while (v != start && m.boundary_.size() <= n_boundary);
  if (m.boundary_.size() != n_boundary) throw Error("mesh boundary has more than one component");

  return m;
}

/// A mesh paired with its uniform refinement. Meshes are shared so a chain of
/// refinements can hand the same fine mesh to the next link.
struct Refinement {
  std::shared_ptr<const Mesh> coarse;
  std::shared_ptr<const Mesh> fine;
  std::vector<int> parent_of;
};

inline Refinement refine(std::shared_ptr<const Mesh> coarse) {
  Refinement r;
  r.fine = std::make_shared<const Mesh>(generate_mesh(coarse->domain(), 2 * coarse->level()));
  r.parent_of.resize(r.fine->num_triangles());
  for (int t = 0; t < r.fine->num_triangles(); ++t) {
    auto [p0, p1, p2] = r.fine->corners(t);
    const Point c = (1.0 / 3.0) * (p0 + p1 + p2);
    const int parent = coarse->locate(c);
    if (parent < 0) throw NestingError("fine triangle outside coarse mesh");
    r.parent_of[t] = parent;
  }
  r.coarse = std::move(coarse);
  return r;
}

/// `count` successive refinements starting at `base`; link k refines the
/// fine mesh of link k-1.
inline std::vector<Refinement> refinement_chain(std::shared_ptr<const Mesh> base, int count) {
  std::vector<Refinement> chain;
  for (int k = 0; k < count; ++k) {
    chain.push_back(refine(base));
    base = chain.back().fine;
  }
  return chain;
}

struct ArclengthEdge {
  BoundaryEdge edge;
  double start = 0.0;
  double end = 0.0;
};

inline std::vector<ArclengthEdge> boundary_arclength_order(const Mesh& mesh) {
  std::vector<ArclengthEdge> out;
  out.reserve(mesh.boundary_edges().size());
  double s = 0.0;
  for (const auto& be : mesh.boundary_edges()) {
    const double len = mesh.edge_length(be.triangle, be.local_edge);
    out.push_back({be, s, s + len});
    s += len;
  }
  return out;
}

} // namespace steklov
