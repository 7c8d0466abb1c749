#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steklov/steklov.hpp"

namespace steklov::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

struct CoefficientFlags {
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<double> alpha_affine;

  CoefficientField field() const {
    if (!alpha_affine.empty()) return CoefficientField::affine_alpha({alpha_affine[0], alpha_affine[1], alpha_affine[2]}, beta);
    return CoefficientField::constant(alpha, beta);
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "constant diffusion coefficient");
    cmd->add_option("--beta", beta, "constant reaction coefficient");
    cmd->add_option("--alpha-affine", alpha_affine, "alpha = c0 + c1*x1 + c2*x2")->expected(3)->delimiter(',');
  }
};

inline std::string sci8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

/// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot open output file " + path);
  fn(os);
}

/// Runs the command line; returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steklov eigenvalue finite-element toolkit"};
  app.require_subcommand(1);

  std::string domain = "lshape", element = "p1", out_path, format = "csv", matrix = "stiffness";
  std::string ref_mode = "bracket", ref_element;
  int level = 8, k = 2, min_level = 8, max_level = 256, ref_level = 512, eig_index = 2;
  bool oracle = false;
  SolverOptions solver;
  CoefficientFlags coeff;

  auto add_domain = [&](CLI::App* c) {
    c->add_option("--domain", domain, "square | lshape | slit")->check(CLI::IsMember({"square", "lshape", "slit"}));
  };
  auto add_element = [&](CLI::App* c) {
    c->add_option("--element", element, "p1 | cr")->check(CLI::IsMember({"p1", "cr"}));
  };
  auto add_solver = [&](CLI::App* c) {
    c->add_option("--tol", solver.tol, "relative residual tolerance");
    c->add_option("--seed", solver.seed, "seed of the starting block");
  };

  auto* mesh_cmd = app.add_subcommand("mesh", "write a mesh dump");
  add_domain(mesh_cmd);
  mesh_cmd->add_option("--level", level)->required();
  mesh_cmd->add_option("--out", out_path, "output file (default stdout)");

  auto* asm_cmd = app.add_subcommand("assemble", "write an assembled matrix");
  add_domain(asm_cmd);
  add_element(asm_cmd);
  asm_cmd->add_option("--level", level)->required();
  asm_cmd->add_option("--matrix", matrix, "stiffness | boundary-mass")
      ->check(CLI::IsMember({"stiffness", "boundary-mass"}));
  asm_cmd->add_option("--out", out_path, "output file (default stdout)");
  coeff.add_to(asm_cmd);

  auto* solve_cmd = app.add_subcommand("solve", "smallest Steklov eigenvalues on one mesh");
  add_domain(solve_cmd);
  add_element(solve_cmd);
  solve_cmd->add_option("--level", level)->required();
  solve_cmd->add_option("--k", k, "number of eigenpairs")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--oracle", oracle, "also print the dense reference eigenvalues");
  add_solver(solve_cmd);
  coeff.add_to(solve_cmd);

  auto* study_cmd = app.add_subcommand("study", "convergence study against a fine reference");
  add_domain(study_cmd);
  add_element(study_cmd);
  study_cmd->add_option("--min-level", min_level);
  study_cmd->add_option("--max-level", max_level);
  study_cmd->add_option("--ref-level", ref_level);
  study_cmd->add_option("--ref-mode", ref_mode, "bracket | richardson")->check(CLI::IsMember({"bracket", "richardson"}));
  study_cmd->add_option("--ref-element", ref_element, "element of the reference eigenfunction (default: --element)")
      ->check(CLI::IsMember({"p1", "cr"}));
  study_cmd->add_option("--eig-index", eig_index)->check(CLI::PositiveNumber);
  study_cmd->add_option("--out", out_path, "table file (default stdout)");
  study_cmd->add_option("--format", format, "csv | markdown")->check(CLI::IsMember({"csv", "markdown"}));
  add_solver(study_cmd);
  coeff.add_to(study_cmd);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    const Domain dom = parse_domain(domain);
    const Family fam = parse_family(element);

    if (*mesh_cmd) {
      const Mesh m = generate_mesh(dom, level);
      with_output(out_path, out, [&](std::ostream& os) { write_mesh(m, os); });
      return kOk;
    }

    if (*asm_cmd) {
      const Mesh m = generate_mesh(dom, level);
      const DofMap dm = build_dof_map(m, fam);
      const SymSparse a = matrix == "stiffness" ? assemble_stiffness(m, dm, coeff.field())
                                                : assemble_boundary_mass(m, dm);
      with_output(out_path, out, [&](std::ostream& os) { write_matrix(a, os); });
      return kOk;
    }

    if (*solve_cmd) {
      const Discretization d =
          discretize(std::make_shared<const Mesh>(generate_mesh(dom, level)), fam, coeff.field());
      const EigenSolution s = solve_pencil(d.pencil, k, solver);
      out << "# " << domain << ' ' << element << " level " << level << " dofs " << d.dofmap->n_dofs << " sweeps "
          << s.sweeps << '\n';
      for (int i = 0; i < k; ++i)
        out << "lambda " << i + 1 << ' ' << detail::fixed8(s.eigenvalues[i]) << " residual "
            << sci8(s.residual_norms[i]) << '\n';
      if (oracle) {
        const EigenSolution o = dense_oracle(d.pencil, k);
        for (int i = 0; i < k; ++i) out << "oracle " << i + 1 << ' ' << detail::fixed8(o.eigenvalues[i]) << '\n';
      }
      return kOk;
    }

    if (*study_cmd) {
      if (min_level > max_level) throw InvalidLevel("--min-level exceeds --max-level");
      StudyConfig cfg;
      cfg.domain = dom;
      cfg.family = fam;
      cfg.levels.clear();
      for (int n = min_level; n <= max_level; n *= 2) cfg.levels.push_back(n);
      cfg.eig_index = eig_index;
      cfg.reference.level = ref_level;
      if (!ref_element.empty()) cfg.reference.family = parse_family(ref_element);
      cfg.reference.mode = ref_mode == "bracket" ? ReferenceMode::Bracket : ReferenceMode::Richardson;
      cfg.coeff = coeff.field();
      cfg.solver = solver;
      const ConvergenceTable t = run_convergence_study(cfg);

      with_output(out_path, out, [&](std::ostream& os) {
        if (format == "csv")
          write_csv(t, os);
        else
          write_markdown(t, os);
      });
      const double r = expected_r(dom);
      out << "# reference eigenvalue " << detail::fixed8(t.reference_eigenvalue) << " (reference "
          << family_name(t.reference_family) << " level " << t.reference_level << ")\n";
      if (t.richardson_observed_order)
        out << "# richardson observed order " << detail::fixed8(*t.richardson_observed_order) << '\n';
      out << "# observed ratio(lambda) " << detail::fixed8(t.last_ratio_lambda()) << "  target 2r = "
          << detail::fixed8(2 * r) << '\n';
      out << "# observed ratio(u) " << detail::fixed8(t.last_ratio_u()) << "  target r+1/2 = "
          << detail::fixed8(r + 0.5) << "  superseded 3r/2 = " << detail::fixed8(1.5 * r) << '\n';
      for (const auto& w : t.warnings) out << "# warning: " << w << '\n';
      return kOk;
    }
  } catch (const InvalidLevel& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidCoefficient& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceFailure& e) {
    err << "error: " << e.what() << "; best residuals:";
    for (double r : e.best_residuals()) err << ' ' << sci8(r);
    err << '\n';
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

} // namespace steklov::cli
