#include "qsylv/phi.hpp"

#include <string>
#include <utility>

namespace qsylv {

namespace {

std::string eq_label(Index i) { return "equation " + std::to_string(i + 1); }

}  // namespace

void PhiSystem::validate() const {
  if (eqs.empty()) throw ShapeError("system must contain at least one equation");
  for (Index i = 0; i < k(); ++i) {
    const auto& e = eqs[static_cast<std::size_t>(i)];
    if (e.E.rows() != e.E.cols()) {
      throw NonSquare(eq_label(i) + ": E must be square, got " + std::to_string(e.E.rows()) +
                      "x" + std::to_string(e.E.cols()));
    }
    if (e.A.rows() != e.p() || e.C.rows() != e.p() || e.F.rows() != e.p()) {
      throw ShapeError(eq_label(i) + ": A, C, F must have the row count of E");
    }
    const PhiHermitianCheck h = phi_hermitian_check(phi, e.E, 1e-12);
    if (!h.pass) {
      throw Error(eq_label(i) + ": E must be phi-Hermitian, defect " + std::to_string(h.defect));
    }
  }
  for (Index i = 0; i + 1 < k(); ++i) {
    const auto& cur = eqs[static_cast<std::size_t>(i)];
    const auto& nxt = eqs[static_cast<std::size_t>(i + 1)];
    if (nxt.c() != cur.f()) {
      throw ShapeError("chain mismatch between " + eq_label(i) + " and " + eq_label(i + 1) +
                       ": the shared unknown is " + std::to_string(cur.f()) + "x" +
                       std::to_string(cur.f()));
    }
  }
}

PhiHermitianCheck phi_hermitian_check(const Involution& phi, const QuatMatrix& a, double tol) {
  if (a.rows() != a.cols()) {
    throw NonSquare("phi-Hermitian check requires a square matrix, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  PhiHermitianCheck out;
  out.defect = fro_norm(a - phi_transpose(phi, a));
  out.pass = out.defect <= tol * (1.0 + fro_norm(a));
  return out;
}

SylvesterSystem to_general_system(const PhiSystem& ps) {
  ps.validate();
  SylvesterSystem sys;
  sys.eqs.reserve(ps.eqs.size());
  for (const auto& e : ps.eqs) {
    FourTermEquation g;
    g.A = e.A;
    g.B = phi_transpose(ps.phi, e.A);
    g.C = e.C;
    g.D = phi_transpose(ps.phi, e.C);
    g.F = e.F;
    g.G = phi_transpose(ps.phi, e.F);
    g.E = e.E;
    sys.eqs.push_back(std::move(g));
  }
  return sys;
}

ConsistencyReport check_phi_system(const PhiSystem& ps, std::optional<double> tol_rank,
                                   bool strict) {
  const SylvesterSystem sys = to_general_system(ps);
  ConsistencyReport out;
  const Index k = sys.k();
  for (Index i = 1; i <= k; ++i) {
    out.conditions.push_back(evaluate_condition(sys, ConditionFamily::eq2a, i, i, tol_rank));
    out.conditions.push_back(evaluate_condition(sys, ConditionFamily::eq3a, i, i, tol_rank));
  }
  for (Index m = 1; m <= k; ++m) {
    for (Index n = m; n <= k; ++n) {
      out.conditions.push_back(evaluate_condition(sys, ConditionFamily::eq4, m, n, tol_rank));
      out.conditions.push_back(evaluate_condition(sys, ConditionFamily::eq5, m, n, tol_rank));
      if (strict) {
        out.conditions.push_back(evaluate_condition(sys, ConditionFamily::eq6, m, n, tol_rank));
        out.conditions.push_back(evaluate_condition(sys, ConditionFamily::eq7, m, n, tol_rank));
      }
    }
  }
  out.consistent = true;
  for (const auto& c : out.conditions) out.consistent = out.consistent && c.pass;
  return out;
}

PhiSolution solve_phi_system(const PhiSystem& ps, const SolveOptions& opts, SolveStats* stats) {
  const SylvesterSystem sys = to_general_system(ps);
  SystemSolution gsol;
  try {
    gsol = solve_system(sys, opts, stats);
  } catch (const InconsistentSystem& e) {
    throw InconsistentSystem(check_phi_system(ps, opts.tol_rank), e.what());
  }
  PhiSolution sol;
  const Index k = ps.k();
  sol.X.reserve(static_cast<std::size_t>(k));
  sol.Z.reserve(static_cast<std::size_t>(k + 1));
  for (Index i = 0; i < k; ++i) {
    sol.X.push_back(0.5 * (gsol.X[static_cast<std::size_t>(i)] +
                           phi_transpose(ps.phi, gsol.Y[static_cast<std::size_t>(i)])));
  }
  for (Index i = 0; i <= k; ++i) {
    const auto& z = gsol.Z[static_cast<std::size_t>(i)];
    sol.Z.push_back(0.5 * (z + phi_transpose(ps.phi, z)));
  }
  sol.residuals = phi_residuals(ps, sol);
  for (Index i = 0; i < k; ++i) {
    const double scale = 1.0 + fro_norm(ps.eqs[static_cast<std::size_t>(i)].E);
    if (!(sol.residuals[static_cast<std::size_t>(i)] <= opts.tol_solution * scale)) {
      throw InconsistentSystem(check_phi_system(ps, opts.tol_rank),
                               "symmetrized solution residual " +
                                   std::to_string(sol.residuals[static_cast<std::size_t>(i)]) +
                                   " exceeds tolerance at " + eq_label(i));
    }
  }
  return sol;
}

std::vector<double> phi_residuals(const PhiSystem& ps, const PhiSolution& sol) {
  ps.validate();
  const Index k = ps.k();
  if (static_cast<Index>(sol.X.size()) != k) throw ShapeError("solution must have k X blocks");
  if (static_cast<Index>(sol.Z.size()) != k + 1) {
    throw ShapeError("solution must have k + 1 Z blocks");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const auto& e = ps.eqs[static_cast<std::size_t>(i)];
    const auto& x = sol.X[static_cast<std::size_t>(i)];
    const auto& z = sol.Z[static_cast<std::size_t>(i)];
    const auto& zn = sol.Z[static_cast<std::size_t>(i + 1)];
    if (x.rows() != e.a() || x.cols() != e.p()) {
      throw ShapeError(eq_label(i) + ": X block has wrong shape");
    }
    if (z.rows() != e.c() || z.cols() != e.c()) {
      throw ShapeError(eq_label(i) + ": Z block has wrong shape");
    }
    if (zn.rows() != e.f() || zn.cols() != e.f()) {
      throw ShapeError(eq_label(i) + ": trailing Z block has wrong shape");
    }
    const QuatMatrix ax = e.A * x;
    const QuatMatrix lhs = ax + phi_transpose(ps.phi, ax) +
                           e.C * z * phi_transpose(ps.phi, e.C) +
                           e.F * zn * phi_transpose(ps.phi, e.F);
    out.push_back(fro_norm(lhs - e.E));
  }
  return out;
}

}  // namespace qsylv
