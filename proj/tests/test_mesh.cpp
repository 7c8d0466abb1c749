#include <cmath>
#include <map>
#include <set>
#include <utility>

#include <gtest/gtest.h>

#include "steklov/mesh.hpp"

using namespace steklov;

namespace {

constexpr Domain kDomains[] = {Domain::UnitSquare, Domain::LShape, Domain::SlitSquare};

int count_edges(const Mesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles())
    for (int e = 0; e < 3; ++e) {
      int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return static_cast<int>(edges.size());
}

} // namespace

TEST(Mesh, CountsAtLevelTwo) {
  const Mesh sq = generate_mesh(Domain::UnitSquare, 2);
  EXPECT_EQ(sq.num_vertices(), 9);
  EXPECT_EQ(sq.num_triangles(), 8);
  EXPECT_EQ(sq.boundary_edges().size(), 8u);
  EXPECT_DOUBLE_EQ(sq.h(), std::sqrt(2.0) / 2);

  const Mesh l = generate_mesh(Domain::LShape, 2);
  EXPECT_EQ(l.num_vertices(), 8);
  EXPECT_EQ(l.num_triangles(), 6);
  EXPECT_EQ(l.boundary_edges().size(), 8u);
  for (const auto& v : l.vertices()) EXPECT_FALSE(v.x == 1.0 && v.y == 1.0);

  const Mesh s = generate_mesh(Domain::SlitSquare, 2);
  EXPECT_EQ(s.num_vertices(), 10);
  EXPECT_EQ(s.num_triangles(), 8);
  EXPECT_EQ(s.boundary_edges().size(), 10u);
}

TEST(Mesh, SlitDuplicationRuleByEnumeration) {
  // Independent count: grid vertices plus one copy per grid point strictly
  // right of the tip on the slit line.
  for (int n : {2, 4, 8, 16}) {
    int expected = (n + 1) * (n + 1);
    for (int i = 0; i <= n; ++i)
      if (2 * i > n) ++expected;
    const Mesh m = generate_mesh(Domain::SlitSquare, n);
    EXPECT_EQ(m.num_vertices(), expected) << n;

    std::map<std::pair<double, double>, int> copies;
    for (const auto& v : m.vertices()) ++copies[{v.x, v.y}];
    EXPECT_EQ((copies[{0.5, 0.5}]), 1);
    for (const auto& [p, c] : copies) EXPECT_EQ(c, (p.second == 0.5 && p.first > 0.5) ? 2 : 1);
  }
}

TEST(Mesh, InvalidLevels) {
  EXPECT_THROW(generate_mesh(Domain::UnitSquare, 1), InvalidLevel);
  EXPECT_THROW(generate_mesh(Domain::LShape, 3), InvalidLevel);
  EXPECT_THROW(generate_mesh(Domain::SlitSquare, 5), InvalidLevel);
  EXPECT_THROW(generate_mesh(Domain::LShape, 0), InvalidLevel);
  EXPECT_NO_THROW(generate_mesh(Domain::UnitSquare, 3));
}

TEST(Mesh, RightIsoscelesCounterclockwiseTriangles) {
  for (Domain d : kDomains) {
    const Mesh m = generate_mesh(d, 8);
    const double s = m.grid_step();
    for (int t = 0; t < m.num_triangles(); ++t) {
      EXPECT_NEAR(m.area(t), 0.5 * s * s, 1e-15);
      std::array<double, 3> len{m.edge_length(t, 0), m.edge_length(t, 1), m.edge_length(t, 2)};
      std::sort(len.begin(), len.end());
      EXPECT_NEAR(len[0], s, 1e-15);
      EXPECT_NEAR(len[1], s, 1e-15);
      EXPECT_NEAR(len[2], s * std::sqrt(2.0), 1e-15);
    }
  }
}

TEST(Mesh, AreaPerimeterIdentitiesUpTo512) {
  for (Domain d : kDomains)
    for (int n = 2; n <= 512; n *= 2) {
      const Mesh m = generate_mesh(d, n);
      double area = 0.0;
      for (int t = 0; t < m.num_triangles(); ++t) area += m.area(t);
      EXPECT_NEAR(area, domain_area(d), 1e-12 * domain_area(d)) << domain_name(d) << ' ' << n;
      const auto arc = boundary_arclength_order(m);
      EXPECT_NEAR(arc.back().end, domain_perimeter(d), 1e-12 * domain_perimeter(d)) << domain_name(d) << ' ' << n;
    }
}

TEST(Mesh, ArclengthEndsAtPerimeterLevelTwo) {
  EXPECT_DOUBLE_EQ(boundary_arclength_order(generate_mesh(Domain::UnitSquare, 2)).back().end, 4.0);
  EXPECT_DOUBLE_EQ(boundary_arclength_order(generate_mesh(Domain::LShape, 2)).back().end, 4.0);
  EXPECT_DOUBLE_EQ(boundary_arclength_order(generate_mesh(Domain::SlitSquare, 2)).back().end, 5.0);
}

TEST(Mesh, EdgeSharingAndEuler) {
  for (Domain d : kDomains)
    for (int n : {2, 4, 8, 32}) {
      const Mesh m = generate_mesh(d, n);
      std::map<std::pair<int, int>, int> owners;
      for (const auto& t : m.triangles())
        for (int e = 0; e < 3; ++e) {
          int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
          ++owners[{std::min(a, b), std::max(a, b)}];
        }
      std::size_t boundary = 0;
      for (const auto& [e, c] : owners) {
        EXPECT_TRUE(c == 1 || c == 2);
        if (c == 1) ++boundary;
      }
      EXPECT_EQ(boundary, m.boundary_edges().size());
      EXPECT_EQ(m.num_vertices() - count_edges(m) + m.num_triangles(), 1) << domain_name(d) << ' ' << n;
    }
}

TEST(Mesh, BoundaryIsOneCounterclockwiseChainFromOrigin) {
  for (Domain d : kDomains) {
    const Mesh m = generate_mesh(d, 8);
    const auto be = m.boundary_edges();
    auto [first, _] = m.edge_vertices(be[0].triangle, be[0].local_edge);
    EXPECT_EQ(m.vertices()[first].x, 0.0);
    EXPECT_EQ(m.vertices()[first].y, 0.0);
    for (std::size_t k = 0; k < be.size(); ++k) {
      auto [a, b] = m.edge_vertices(be[k].triangle, be[k].local_edge);
      auto [c, unused] = m.edge_vertices(be[(k + 1) % be.size()].triangle, be[(k + 1) % be.size()].local_edge);
      EXPECT_EQ(b, c);
      // interior lies to the left: the opposite vertex has positive orientation
      const Point pa = m.vertices()[a], pb = m.vertices()[b];
      const Point po = m.vertices()[m.triangles()[be[k].triangle][be[k].local_edge]];
      EXPECT_GT((pb.x - pa.x) * (po.y - pa.y) - (po.x - pa.x) * (pb.y - pa.y), 0.0);
    }
    // signed area by the shoelace formula is positive for a counterclockwise curve
    double shoelace = 0.0;
    for (const auto& e : be) {
      auto [a, b] = m.edge_vertices(e.triangle, e.local_edge);
      shoelace += m.vertices()[a].x * m.vertices()[b].y - m.vertices()[b].x * m.vertices()[a].y;
    }
    EXPECT_NEAR(0.5 * shoelace, domain_area(d), 1e-12);
  }
}

TEST(Mesh, NoTriangleStraddlesTheSlit) {
  const Mesh m = generate_mesh(Domain::SlitSquare, 16);
  for (int t = 0; t < m.num_triangles(); ++t) {
    auto [p0, p1, p2] = m.corners(t);
    const double cy = (p0.y + p1.y + p2.y) / 3.0;
    for (int v : m.triangles()[t]) {
      const SlitSide s = m.vertex_side(v);
      if (s == SlitSide::None) continue;
      EXPECT_EQ(s, cy > 0.5 ? SlitSide::Upper : SlitSide::Lower);
      EXPECT_EQ(s, m.triangle_side(t));
    }
  }
}

TEST(Refine, CountsAndDuplicates) {
  auto sq = std::make_shared<const Mesh>(generate_mesh(Domain::UnitSquare, 2));
  Refinement r = refine(sq);
  EXPECT_EQ(r.fine->num_vertices(), 25);
  EXPECT_EQ(r.fine->num_triangles(), 32);

  auto l = std::make_shared<const Mesh>(generate_mesh(Domain::LShape, 2));
  EXPECT_EQ(refine(l).fine->num_triangles(), 24);

  auto s = std::make_shared<const Mesh>(generate_mesh(Domain::SlitSquare, 2));
  const Mesh& f = *refine(s).fine;
  int dup = 0, tip = 0;
  for (const auto& v : f.vertices()) {
    if (v.y == 0.5 && v.x > 0.5 && f.vertex_side(&v - f.vertices().data()) == SlitSide::Upper) ++dup;
    if (v.x == 0.5 && v.y == 0.5) ++tip;
  }
  EXPECT_EQ(dup, 2); // (3/4, 1/2) and (1, 1/2)
  EXPECT_EQ(tip, 1);
}

TEST(Refine, ChildrenNestInsideParents) {
  for (Domain d : kDomains) {
    auto coarse = std::make_shared<const Mesh>(generate_mesh(d, 8));
    const Refinement r = refine(coarse);
    EXPECT_EQ(r.fine->level(), 16);
    std::vector<int> children(coarse->num_triangles(), 0);
    for (int t = 0; t < r.fine->num_triangles(); ++t) {
      const int p = r.parent_of[t];
      ASSERT_GE(p, 0);
      ++children[p];
      for (const Point& c : r.fine->corners(t)) {
        const Barycentric b = coarse->barycentric(p, c);
        for (double l : b) EXPECT_GE(l, -1e-14);
      }
    }
    for (int c : children) EXPECT_EQ(c, 4);
    // two fine boundary edges per coarse boundary edge
    EXPECT_EQ(r.fine->boundary_edges().size(), 2 * coarse->boundary_edges().size());
  }
}

TEST(Mesh, LocateHandlesGridLinesAndSlitSides) {
  const Mesh l = generate_mesh(Domain::LShape, 4);
  EXPECT_GE(l.locate({1.0, 0.5}), 0);
  EXPECT_GE(l.locate({0.5, 1.0}), 0);
  EXPECT_EQ(l.locate({0.9, 0.9}), -1);

  const Mesh s = generate_mesh(Domain::SlitSquare, 4);
  const int up = s.locate({0.8, 0.5}, SlitSide::Upper);
  const int lo = s.locate({0.8, 0.5}, SlitSide::Lower);
  EXPECT_EQ(s.triangle_side(up), SlitSide::Upper);
  EXPECT_EQ(s.triangle_side(lo), SlitSide::Lower);
}
