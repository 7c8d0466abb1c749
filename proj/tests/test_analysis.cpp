#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "steklov/analysis.hpp"
#include "steklov/interp.hpp"

using namespace steklov;

namespace {

struct Space {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DofMap> dofmap;

  FeFunction of(Eigen::VectorXd v) const { return {mesh, dofmap, std::move(v)}; }
  FeFunction interp(const PointFunction& f) const { return of(interpolate(*mesh, *dofmap, f)); }
};

Space space(Domain d, Family f, int n) {
  auto m = std::make_shared<const Mesh>(generate_mesh(d, n));
  return {m, std::make_shared<const DofMap>(build_dof_map(*m, f))};
}

const PointFunction kOne{[](Point) { return 1.0; }};
const PointFunction kX{[](Point p) { return p.x; }};

} // namespace

TEST(Norms, BoundaryNormsOfConstants) {
  EXPECT_NEAR(boundary_l2_norm(generate_mesh(Domain::UnitSquare, 4), kOne), 2.0, 1e-14);
  EXPECT_NEAR(boundary_l2_norm(generate_mesh(Domain::SlitSquare, 4), kOne), std::sqrt(5.0), 1e-14);
  const Space s = space(Domain::SlitSquare, Family::CR, 4);
  EXPECT_NEAR(boundary_l2_norm(s.interp(kOne)), std::sqrt(5.0), 1e-14);
}

TEST(Norms, BrokenH1) {
  const Space s = space(Domain::UnitSquare, Family::P1, 4);
  EXPECT_NEAR(broken_h1_norm(s.interp(kOne)), 1.0, 1e-14);
  // |x|^2_1 = 1, ||x||^2_0 = 1/3; midpoint quadrature is exact for quadratics
  EXPECT_NEAR(broken_h1_norm(s.interp(kX)), std::sqrt(4.0 / 3.0), 1e-14);
  EXPECT_NEAR(broken_h1_norm(space(Domain::LShape, Family::CR, 4).interp(kOne)), std::sqrt(0.75), 1e-14);
}

TEST(Norms, BoundaryNormMatchesMatrix) {
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::SlitSquare})
    for (Family f : {Family::P1, Family::CR}) {
      const Space s = space(d, f, 8);
      const SymSparse b = assemble_boundary_mass(*s.mesh, *s.dofmap);
      Eigen::VectorXd v(s.dofmap->n_dofs);
      for (auto& x : v) x = nd(rng);
      const double n = boundary_l2_norm(s.of(v));
      EXPECT_NEAR(n * n, v.dot(b * v), 1e-12 * v.dot(b * v));
    }
}

TEST(Align, FlipsToMatchReference) {
  const Space s = space(Domain::LShape, Family::P1, 8);
  const FeFunction x = s.interp(kX);
  EXPECT_EQ(align_sign(-x, x).values, x.values);
  EXPECT_EQ(align_sign(x, x).values, x.values);
  EXPECT_EQ(align_sign(-x, kX).values, x.values);
  const FeFunction zero = s.of(Eigen::VectorXd::Zero(s.dofmap->n_dofs));
  EXPECT_THROW(align_sign(zero, x), AmbiguousAlignment);
}

TEST(Transfer, IdentityAndLinears) {
  auto coarse = std::make_shared<const Mesh>(generate_mesh(Domain::SlitSquare, 4));
  std::vector<Refinement> chain{refine(coarse)};
  chain.push_back(refine(chain.back().fine));
  for (Family f : {Family::P1, Family::CR}) {
    auto fdm = std::make_shared<const DofMap>(build_dof_map(*chain.back().fine, f));
    const FeFunction fine{chain.back().fine, fdm, interpolate(*chain.back().fine, *fdm, kX)};
    const TransferredReference ref = transfer_reference(fine, chain, coarse);
    EXPECT_EQ(ref.subdivisions(), 4);
    auto cdm = std::make_shared<const DofMap>(build_dof_map(*coarse, f));
    const FeFunction u{coarse, cdm, interpolate(*coarse, *cdm, kX)};
    EXPECT_LT(boundary_l2_error(u, ref), 1e-14);
    for (int t = 0; t < coarse->num_triangles(); ++t)
      EXPECT_NEAR(ref.at(t, {0.2, 0.3, 0.5}), coarse->point(t, {0.2, 0.3, 0.5}).x, 1e-14);
  }
  const Space same = space(Domain::UnitSquare, Family::P1, 4);
  EXPECT_EQ(boundary_l2_error(same.interp(kX), same.interp(kX)), 0.0);
}

TEST(Transfer, SlitSidesStaySeparate) {
  // a function that jumps across the slit must transfer without mixing sides
  auto coarse = std::make_shared<const Mesh>(generate_mesh(Domain::SlitSquare, 8));
  const Refinement r = refine(coarse);
  auto fdm = std::make_shared<const DofMap>(build_dof_map(*r.fine, Family::P1));
  const PointFunction g = singular_model(Domain::SlitSquare);
  const FeFunction fine{r.fine, fdm, interpolate(*r.fine, *fdm, g)};
  const TransferredReference ref = transfer_reference(fine, {r}, coarse);
  for (int t = 0; t < coarse->num_triangles(); ++t) {
    if (coarse->triangle_side(t) == SlitSide::None) continue;
    for (int e = 0; e < 3; ++e) {
      const Barycentric b = edge_point(e, 0.5);
      const Point p = coarse->point(t, b);
      if (p.y != 0.5 || p.x <= 0.5) continue;
      EXPECT_NEAR(ref.at(t, b), g(p, coarse->triangle_side(t)), 1e-14);
    }
  }
}

TEST(Transfer, AgreesWithDirectFineQuadrature) {
  // second path: locate every fine boundary quadrature point in the coarse
  // mesh directly instead of descending the refinement chain
  auto coarse = std::make_shared<const Mesh>(generate_mesh(Domain::LShape, 4));
  const Refinement r = refine(coarse);
  const Space cs{coarse, std::make_shared<const DofMap>(build_dof_map(*coarse, Family::P1))};
  const Space fs{r.fine, std::make_shared<const DofMap>(build_dof_map(*r.fine, Family::P1))};
  const PointFunction g = singular_model(Domain::LShape);
  const FeFunction u = cs.interp(kX), v = fs.interp(g);

  double direct = 0.0;
  for (const auto& be : r.fine->boundary_edges()) {
    const double len = r.fine->edge_length(be.triangle, be.local_edge);
    for (double t : kEdgeGauss) {
      const Barycentric fb = edge_point(be.local_edge, t);
      const Point p = r.fine->point(be.triangle, fb);
      const int ct = coarse->locate(p);
      ASSERT_GE(ct, 0);
      const double d = u(ct, coarse->barycentric(ct, p)) - v(be.triangle, fb);
      direct += 0.5 * len * d * d;
    }
  }
  EXPECT_NEAR(boundary_l2_error(u, transfer_reference(v, {r}, coarse)), std::sqrt(direct), 1e-13);
}

TEST(ErrorNorm, SymmetricAndTriangleInequality) {
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  const Space s = space(Domain::SlitSquare, Family::CR, 8);
  auto random = [&] {
    Eigen::VectorXd v(s.dofmap->n_dofs);
    for (auto& x : v) x = nd(rng);
    return s.of(v);
  };
  for (int trial = 0; trial < 10; ++trial) {
    const FeFunction u = random(), v = random(), w = random();
    EXPECT_NEAR(boundary_l2_error(u, v), boundary_l2_error(v, u), 1e-13);
    EXPECT_LE(boundary_l2_error(u, w), boundary_l2_error(u, v) + boundary_l2_error(v, w) + 1e-12);
  }
}

TEST(ErrorNorm, NestingErrors) {
  auto a = std::make_shared<const Mesh>(generate_mesh(Domain::LShape, 4));
  auto b = std::make_shared<const Mesh>(generate_mesh(Domain::LShape, 8));
  auto dm = std::make_shared<const DofMap>(build_dof_map(*b, Family::P1));
  const FeFunction fine{b, dm, Eigen::VectorXd::Ones(dm->n_dofs)};
  EXPECT_THROW(transfer_reference(fine, {}, a), NestingError);
  auto other = std::make_shared<const Mesh>(generate_mesh(Domain::SlitSquare, 4));
  EXPECT_THROW(transfer_reference(fine, {refine(other)}, a), NestingError);
}

TEST(Ratio, Values) {
  EXPECT_DOUBLE_EQ(convergence_ratio(0.4, 0.2), 1.0);
  EXPECT_NEAR(convergence_ratio(0.02800065, 0.01287370), 1.12103345, 5e-7); // inputs carry 8 digits
  // eigenvalue errors of the first two L-shape rows against the bracket midpoint
  const double lam = 0.89364583;
  EXPECT_NEAR(convergence_ratio(0.92115806 - lam, 0.90400049 - lam), 1.40979290, 2e-6);
  EXPECT_THROW(convergence_ratio(0.0, 0.1), UndefinedRatio);
  EXPECT_THROW(convergence_ratio(0.1, -0.1), UndefinedRatio);
}
