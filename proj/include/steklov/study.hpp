#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "steklov/analysis.hpp"
#include "steklov/eigensolver.hpp"
#include "steklov/fem.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

enum class ReferenceMode { Bracket, Richardson };

/// High-precision brackets for the second eigenvalue (alpha = beta = 1),
/// obtained by adaptive refinement.
inline std::optional<std::pair<double, double>> reference_bracket(Domain d) {
  switch (d) {
  case Domain::LShape: return std::pair{0.89364476, 0.89364690};
  case Domain::SlitSquare: return std::pair{0.734554376, 0.73455822};
  default: return std::nullopt;
  }
}

struct ReferenceSpec {
  ReferenceMode mode = ReferenceMode::Bracket;
  /// Level of the reference eigenfunction.
  int level = 512;
  /// Element of the reference eigenfunction; the study's own element when
  /// unset. The eigenvalue extrapolation always uses conforming solves.
  std::optional<Family> family;
};

struct StudyConfig {
  Domain domain = Domain::LShape;
  Family family = Family::P1;
  std::vector<int> levels{8, 16, 32, 64, 128, 256};
  int eig_index = 2;
  ReferenceSpec reference;
  CoefficientField coeff;
  SolverOptions solver;
};

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double lambda = 0.0;
  std::optional<double> ratio_lambda;
  double err_boundary = 0.0;
  std::optional<double> ratio_u;
};

struct ConvergenceTable {
  Domain domain = Domain::LShape;
  Family family = Family::P1;
  int eig_index = 2;
  int reference_level = 0;
  Family reference_family = Family::P1;
  double reference_eigenvalue = 0.0;
  /// Richardson mode: order observed on the three finest conforming levels.
  std::optional<double> richardson_observed_order;
  std::vector<ConvergenceRow> rows;
  std::vector<std::string> warnings;

  std::optional<double> last_ratio_lambda() const {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      if (it->ratio_lambda) return it->ratio_lambda;
    return std::nullopt;
  }
  std::optional<double> last_ratio_u() const {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      if (it->ratio_u) return it->ratio_u;
    return std::nullopt;
  }
};

/// Everything needed to solve on one mesh.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DofMap> dofmap;
  Pencil pencil;
};

inline Discretization discretize(std::shared_ptr<const Mesh> mesh, Family family, const CoefficientField& coeff) {
  auto dm = std::make_shared<const DofMap>(build_dof_map(*mesh, family));
  Pencil p{assemble_stiffness(*mesh, *dm, coeff), assemble_boundary_mass(*mesh, *dm)};
  return {std::move(mesh), std::move(dm), std::move(p)};
}

/// lambda_h = lambda + C h^p: eliminate C from two successive levels.
inline double richardson(double coarse, double fine, double order) {
  const double f = std::pow(2.0, order);
  return (f * fine - coarse) / (f - 1.0);
}

namespace detail {

inline bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

} // namespace detail

inline ConvergenceTable run_convergence_study(StudyConfig cfg) {
  if (cfg.levels.empty()) throw Error("no study levels given");
  if (cfg.eig_index < 1) throw Error("eigenvalue index must be at least 1");
  std::sort(cfg.levels.begin(), cfg.levels.end());
  cfg.levels.erase(std::unique(cfg.levels.begin(), cfg.levels.end()), cfg.levels.end());
  const int base = cfg.levels.front();
  for (int n : cfg.levels)
    if (n % base != 0 || !detail::is_power_of_two(n / base))
      throw InvalidLevel("study levels must be the base level times powers of two");
  const int ref_level = cfg.reference.level;
  if (ref_level <= cfg.levels.back() || ref_level % base != 0 || !detail::is_power_of_two(ref_level / base))
    throw InvalidLevel("reference level must be finer than every study level and nested with them");

  const int j = cfg.eig_index;
  ConvergenceTable table;
  table.domain = cfg.domain;
  table.family = cfg.family;
  table.eig_index = j;
  table.reference_level = ref_level;
  table.reference_family = cfg.reference.family.value_or(cfg.family);

  // meshes[k] has level base * 2^k; chain[k] refines meshes[k]
  std::vector<std::shared_ptr<const Mesh>> meshes{std::make_shared<const Mesh>(generate_mesh(cfg.domain, base))};
  std::vector<Refinement> chain;
  while (meshes.back()->level() < ref_level) {
    chain.push_back(refine(meshes.back()));
    meshes.push_back(chain.back().fine);
  }
  auto index_of = [&](int level) {
    int k = 0;
    while (meshes[k]->level() != level) ++k;
    return k;
  };

  // Reference eigenfunction, B-normalized.
  const Family ref_family = cfg.reference.family.value_or(cfg.family);
  FeFunction reference;
  std::optional<double> conforming_fine;
  {
    const Discretization d = discretize(meshes.back(), ref_family, cfg.coeff);
    const EigenSolution s = solve_pencil(d.pencil, j, cfg.solver);
    reference = {d.mesh, d.dofmap, s.vector(j - 1)};
    if (ref_family == Family::P1) conforming_fine = s.eigenvalues[j - 1];
  }

  if (cfg.reference.mode == ReferenceMode::Bracket) {
    const auto bracket = reference_bracket(cfg.domain);
    if (!bracket || j != 2) throw Error("no published reference eigenvalue for this domain and index");
    table.reference_eigenvalue = 0.5 * (bracket->first + bracket->second);
  } else {
    if (ref_level / 4 < 2) throw InvalidLevel("Richardson mode needs a reference level of at least 8");
    std::vector<double> lam;
    for (int level : {ref_level / 4, ref_level / 2, ref_level}) {
      if (level == ref_level && conforming_fine) {
        lam.push_back(*conforming_fine);
        continue;
      }
      const Discretization d = discretize(meshes[index_of(level)], Family::P1, cfg.coeff);
      lam.push_back(solve_pencil(d.pencil, j, cfg.solver).eigenvalues[j - 1]);
    }
    const double order = 2.0 * expected_r(cfg.domain);
    table.reference_eigenvalue = richardson(lam[1], lam[2], order);
    if ((lam[0] - lam[1]) / (lam[1] - lam[2]) > 0.0)
      table.richardson_observed_order = std::log2((lam[0] - lam[1]) / (lam[1] - lam[2]));
  }

  std::vector<double> lambda_err, u_err;
  for (int n : cfg.levels) {
    const int k = index_of(n);
    const Discretization d = discretize(meshes[k], cfg.family, cfg.coeff);
    const EigenSolution s = solve_pencil(d.pencil, j + 1, cfg.solver);
    const double lam = s.eigenvalues[j - 1];
    auto close = [&](double other) { return std::abs(other - lam) <= 1e-8 * std::abs(lam); };
    if ((j >= 2 && close(s.eigenvalues[j - 2])) || close(s.eigenvalues[j]))
      table.warnings.push_back("level " + std::to_string(n) + ": eigenvalue " + std::to_string(j) +
                               " is clustered with a neighbour");

    const TransferredReference ref = transfer_reference(
        reference, std::vector<Refinement>(chain.begin() + k, chain.end()), meshes[k]);
    const FeFunction u = align_sign(FeFunction{d.mesh, d.dofmap, s.vector(j - 1)}, ref);

    ConvergenceRow row;
    row.n = n;
    row.h = meshes[k]->h();
    row.lambda = lam;
    row.err_boundary = boundary_l2_error(u, ref);
    table.rows.push_back(row);
    lambda_err.push_back(std::abs(lam - table.reference_eigenvalue));
    u_err.push_back(row.err_boundary);
  }

  for (std::size_t r = 0; r + 1 < table.rows.size(); ++r) {
    // only consecutive halvings get a ratio
    if (table.rows[r + 1].n != 2 * table.rows[r].n) continue;
    try {
      table.rows[r].ratio_lambda = convergence_ratio(lambda_err[r], lambda_err[r + 1]);
    } catch (const UndefinedRatio&) {
    }
    try {
      table.rows[r].ratio_u = convergence_ratio(u_err[r], u_err[r + 1]);
    } catch (const UndefinedRatio&) {
    }
  }
  return table;
}

namespace detail {

inline std::string fixed8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8f", v);
  return buf;
}

inline std::string fixed8(const std::optional<double>& v) { return v ? fixed8(*v) : std::string(); }

} // namespace detail

inline void write_csv(const ConvergenceTable& t, std::ostream& os) {
  os << "h,lambda,ratio_lambda,err_boundary,ratio_u\n";
  for (const auto& r : t.rows)
    os << "sqrt2/" << r.n << ',' << detail::fixed8(r.lambda) << ',' << detail::fixed8(r.ratio_lambda) << ','
       << detail::fixed8(r.err_boundary) << ',' << detail::fixed8(r.ratio_u) << '\n';
}

inline void write_markdown(const ConvergenceTable& t, std::ostream& os) {
  const std::string j = std::to_string(t.eig_index);
  os << "| h | lambda_" << j << ",h | ratio(lambda_" << j << ",h) | ||u_" << j
     << ",h - u||_0,bd | ratio(u_" << j << ",h) |\n";
  os << "|---|---|---|---|---|\n";
  for (const auto& r : t.rows)
    os << "| sqrt2/" << r.n << " | " << detail::fixed8(r.lambda) << " | " << detail::fixed8(r.ratio_lambda)
       << " | " << detail::fixed8(r.err_boundary) << " | " << detail::fixed8(r.ratio_u) << " |\n";
}

} // namespace steklov
