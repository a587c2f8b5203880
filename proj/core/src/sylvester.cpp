#include "qsylv/sylvester.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qsylv/rng.hpp"

namespace qsylv {

namespace {

std::string eq_label(Index i) { return "equation " + std::to_string(i + 1); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

/// An orthogonal projector has Frobenius norm zero or at least one, so a
/// computed projector far below one is rounding residue of an exact zero.
QuatMatrix snap_projector(QuatMatrix m) {
  if (fro_norm(m) < 0.5) return QuatMatrix(m.rows(), m.cols());
  return m;
}

/// Zero a computed product whose norm sits below the rounding floor set by
/// its factors. Such a value carries no information, and left in place it
/// would act as a full-rank noise matrix under a later pseudoinverse.
QuatMatrix snapped(QuatMatrix m, double factor_scale) {
  if (fro_norm(m) <= default_rank_tol(m.rows(), m.cols(), factor_scale)) {
    return QuatMatrix(m.rows(), m.cols());
  }
  return m;
}

/// Rank cutoff for a projector sandwich of `source`, anchored at the source's
/// scale rather than at the product's own possibly noise-level norm.
std::optional<double> derived_tol(const QuatMatrix& source, std::optional<double> tol) {
  if (tol) return tol;
  return default_rank_tol(source.rows(), source.cols(), fro_norm(source));
}

}  // namespace

void FourTermEquation::validate() const {
  require(A.rows() == p(), "A must have the row count of E");
  require(C.rows() == p(), "C must have the row count of E");
  require(F.rows() == p(), "F must have the row count of E");
  require(B.cols() == q(), "B must have the column count of E");
  require(D.cols() == q(), "D must have the column count of E");
  require(G.cols() == q(), "G must have the column count of E");
}

void SylvesterSystem::validate() const {
  if (eqs.empty()) throw ShapeError("system must contain at least one equation");
  for (Index i = 0; i < k(); ++i) {
    try {
      eqs[static_cast<std::size_t>(i)].validate();
    } catch (const ShapeError& e) {
      throw ShapeError(eq_label(i) + ": " + e.what());
    }
  }
  for (Index i = 0; i + 1 < k(); ++i) {
    const auto& cur = eqs[static_cast<std::size_t>(i)];
    const auto& nxt = eqs[static_cast<std::size_t>(i + 1)];
    require(nxt.c() == cur.f() && nxt.d() == cur.g(),
            "chain mismatch between " + eq_label(i) + " and " + eq_label(i + 1) +
                ": the shared unknown is " + std::to_string(cur.f()) + "x" +
                std::to_string(cur.g()));
  }
}

PinvBundle make_pinv_bundle(QuatMatrix mat, std::optional<double> tol) {
  PinvBundle out;
  out.pinv = pinv(mat, tol);
  out.l = snap_projector(QuatMatrix::identity(mat.cols()) - out.pinv * mat);
  out.r = snap_projector(QuatMatrix::identity(mat.rows()) - mat * out.pinv);
  out.mat = std::move(mat);
  return out;
}

EquationAux equation_aux(const FourTermEquation& eq, std::optional<double> tol) {
  eq.validate();
  EquationAux out;
  out.a = make_pinv_bundle(eq.A, tol);
  out.b = make_pinv_bundle(eq.B, tol);
  // A projector sandwich can cancel its input down to round off, so each
  // derived bundle takes its cutoff from the matrix it sandwiches.
  out.rc = make_pinv_bundle(out.a.r * eq.C, derived_tol(eq.C, tol));
  out.dl = make_pinv_bundle(eq.D * out.b.l, derived_tol(eq.D, tol));
  out.rf = make_pinv_bundle(out.a.r * eq.F, derived_tol(eq.F, tol));
  out.gl = make_pinv_bundle(eq.G * out.b.l, derived_tol(eq.G, tol));
  out.re = out.a.r * eq.E * out.b.l;
  out.mm = make_pinv_bundle(out.rc.r * out.rf.mat, derived_tol(eq.F, tol));
  out.nn = make_pinv_bundle(out.gl.mat * out.dl.l, derived_tol(eq.G, tol));
  out.ss = make_pinv_bundle(out.rf.mat * out.mm.l, derived_tol(eq.F, tol));
  return out;
}

EquationConsistency equation_consistent(const EquationAux& aux, double tol_res) {
  EquationConsistency out;
  out.residuals[0] = fro_norm(aux.mm.r * (aux.rc.r * aux.re));
  out.residuals[1] = fro_norm((aux.re * aux.dl.l) * aux.nn.l);
  out.residuals[2] = fro_norm((aux.rc.r * aux.re) * aux.gl.l);
  out.residuals[3] = fro_norm((aux.rf.r * aux.re) * aux.dl.l);
  out.threshold = tol_res * (1.0 + fro_norm(aux.re));
  out.pass = true;
  for (double r : out.residuals) out.pass = out.pass && r <= out.threshold;
  return out;
}

FreeParams FreeParams::zeros(const FourTermEquation& eq) {
  FreeParams t;
  t.t1 = QuatMatrix(eq.f(), eq.g());
  t.t2 = QuatMatrix(eq.f(), eq.g());
  t.t3 = QuatMatrix(eq.f(), eq.g());
  t.t4 = QuatMatrix(eq.c(), eq.d());
  t.t5 = QuatMatrix(eq.c(), eq.d());
  t.t6 = QuatMatrix(eq.a(), eq.q());
  t.t7 = QuatMatrix(eq.a(), eq.b());
  t.t8 = QuatMatrix(eq.p(), eq.b());
  return t;
}

FreeParams FreeParams::random(const FourTermEquation& eq, Rng& rng) {
  FreeParams t;
  t.t1 = random_matrix(rng, eq.f(), eq.g());
  t.t2 = random_matrix(rng, eq.f(), eq.g());
  t.t3 = random_matrix(rng, eq.f(), eq.g());
  t.t4 = random_matrix(rng, eq.c(), eq.d());
  t.t5 = random_matrix(rng, eq.c(), eq.d());
  t.t6 = random_matrix(rng, eq.a(), eq.q());
  t.t7 = random_matrix(rng, eq.a(), eq.b());
  t.t8 = random_matrix(rng, eq.p(), eq.b());
  return t;
}

namespace {

/// Parameter-free part of Z in the closed-form solution of one equation.
QuatMatrix z_particular(const EquationAux& x) {
  return x.rc.pinv * (x.re * x.dl.pinv) -
         x.rc.pinv * (x.rf.mat * (x.mm.pinv * (x.re * x.dl.pinv))) -
         x.rc.pinv * (x.ss.mat * (x.rf.pinv * (x.re * (x.nn.pinv * (x.gl.mat * x.dl.pinv)))));
}

/// Parameter-free part of Z' in the closed-form solution of one equation.
QuatMatrix zp_particular(const EquationAux& x) {
  return x.mm.pinv * (x.re * x.gl.pinv) +
         x.ss.pinv * (x.ss.mat * (x.rf.pinv * (x.re * x.nn.pinv)));
}

std::pair<QuatMatrix, QuatMatrix> solve_equation_z(const EquationAux& x, const FreeParams& t) {
  QuatMatrix z = z_particular(x) -
                 x.rc.pinv * (x.ss.mat * (t.t2 * (x.nn.r * (x.gl.mat * x.dl.pinv)))) +
                 x.rc.l * t.t4 + t.t5 * x.dl.r;
  QuatMatrix zp = zp_particular(x) + x.mm.l * (x.ss.l * t.t1) + x.mm.l * (t.t2 * x.nn.r) +
                  t.t3 * x.gl.r;
  return {std::move(z), std::move(zp)};
}

std::pair<QuatMatrix, QuatMatrix> solve_equation_xy(const FourTermEquation& eq,
                                                    const EquationAux& x, const FreeParams& t,
                                                    const QuatMatrix& z,
                                                    const QuatMatrix& z_next) {
  const QuatMatrix et = eq.E - eq.C * z * eq.D - eq.F * z_next * eq.G;
  QuatMatrix xx = x.a.pinv * et - t.t7 * eq.B + x.a.l * t.t6;
  QuatMatrix yy = x.a.r * (et * x.b.pinv) + eq.A * t.t7 + t.t8 * x.b.r;
  return {std::move(xx), std::move(yy)};
}

}  // namespace

EquationSolution solve_equation(const FourTermEquation& eq, const EquationAux& aux,
                                const FreeParams& t) {
  EquationSolution out;
  auto [z, zp] = solve_equation_z(aux, t);
  auto [x, y] = solve_equation_xy(eq, aux, t, z, zp);
  out.z = std::move(z);
  out.zp = std::move(zp);
  out.x = std::move(x);
  out.y = std::move(y);
  return out;
}

const char* family_name(ConditionFamily f) {
  switch (f) {
    case ConditionFamily::eq2a: return "EQ2a";
    case ConditionFamily::eq2b: return "EQ2b";
    case ConditionFamily::eq3a: return "EQ3a";
    case ConditionFamily::eq3b: return "EQ3b";
    case ConditionFamily::eq4: return "EQ4";
    case ConditionFamily::eq5: return "EQ5";
    case ConditionFamily::eq6: return "EQ6";
    case ConditionFamily::eq7: return "EQ7";
  }
  return "?";
}

std::optional<ConditionFamily> family_from_name(const std::string& name) {
  static const std::pair<const char*, ConditionFamily> table[] = {
      {"EQ2a", ConditionFamily::eq2a}, {"EQ2b", ConditionFamily::eq2b},
      {"EQ3a", ConditionFamily::eq3a}, {"EQ3b", ConditionFamily::eq3b},
      {"EQ4", ConditionFamily::eq4},   {"EQ5", ConditionFamily::eq5},
      {"EQ6", ConditionFamily::eq6},   {"EQ7", ConditionFamily::eq7},
  };
  for (const auto& [n, f] : table) {
    if (name == n) return f;
  }
  return std::nullopt;
}

bool is_window_family(ConditionFamily f) {
  return f == ConditionFamily::eq4 || f == ConditionFamily::eq5 || f == ConditionFamily::eq6 ||
         f == ConditionFamily::eq7;
}

namespace {

using Grid = std::vector<std::vector<BlockCell>>;

Grid make_grid(Index rows, Index cols) {
  return Grid(static_cast<std::size_t>(rows), std::vector<BlockCell>(static_cast<std::size_t>(cols)));
}

BlockCell& at(Grid& g, Index i, Index j) {
  return g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

QuatMatrix finish(Grid g) { return assemble_block(BlockSpec{std::move(g)}); }

const FourTermEquation& nth(const SylvesterSystem& sys, Index m, Index j) {
  return sys.eqs[static_cast<std::size_t>(m - 1 + j)];
}

int alt_sign(Index j) { return j % 2 == 0 ? 1 : -1; }

/// Per-equation family blocks, in display order.
ConditionParts build_single(const FourTermEquation& e, ConditionFamily fam) {
  ConditionParts out;
  switch (fam) {
    case ConditionFamily::eq2a: {
      Grid lhs = make_grid(2, 4);
      at(lhs, 0, 0) = {e.E};
      at(lhs, 0, 1) = {e.A};
      at(lhs, 0, 2) = {e.C};
      at(lhs, 0, 3) = {e.F};
      at(lhs, 1, 0) = {e.B};
      out.lhs = finish(std::move(lhs));
      out.rhs_a = hstack({e.A, e.C, e.F});
      out.rhs_b = e.B;
      break;
    }
    case ConditionFamily::eq2b: {
      Grid lhs = make_grid(4, 2);
      at(lhs, 0, 0) = {e.E};
      at(lhs, 0, 1) = {e.A};
      at(lhs, 1, 0) = {e.B};
      at(lhs, 2, 0) = {e.D};
      at(lhs, 3, 0) = {e.G};
      out.lhs = finish(std::move(lhs));
      out.rhs_a = vstack({e.B, e.D, e.G});
      out.rhs_b = e.A;
      break;
    }
    case ConditionFamily::eq3a: {
      Grid lhs = make_grid(3, 3);
      at(lhs, 0, 0) = {e.E};
      at(lhs, 0, 1) = {e.A};
      at(lhs, 0, 2) = {e.C};
      at(lhs, 1, 0) = {e.B};
      at(lhs, 2, 0) = {e.G};
      out.lhs = finish(std::move(lhs));
      out.rhs_a = hstack({e.A, e.C});
      out.rhs_b = vstack({e.B, e.G});
      break;
    }
    default: {  // eq3b
      Grid lhs = make_grid(3, 3);
      at(lhs, 0, 0) = {e.E};
      at(lhs, 0, 1) = {e.A};
      at(lhs, 0, 2) = {e.F};
      at(lhs, 1, 0) = {e.B};
      at(lhs, 2, 0) = {e.D};
      out.lhs = finish(std::move(lhs));
      out.rhs_a = hstack({e.A, e.F});
      out.rhs_b = vstack({e.B, e.D});
      break;
    }
  }
  return out;
}

/// Window family layouts. The lhs of each family interleaves coefficient
/// columns with the E columns of the window; consecutive equations are tied
/// by ladder rows [G_i  D_{i+1}] placed under the E columns they couple, and
/// the B blocks close the column space from below. The four families differ
/// only in which boundary coefficient blocks (the leading C / D and the
/// trailing F / G) appear as columns or as rows.
ConditionParts build_window(const SylvesterSystem& sys, ConditionFamily fam, Index m, Index n) {
  const Index w = n - m + 1;
  ConditionParts out;
  switch (fam) {
    case ConditionFamily::eq4: {
      // Columns: C and F both appear as columns (shared CF slots); rows: none
      // of D_m, G_n. lhs is (3w-1) x (3w+1) blocks.
      Grid lhs = make_grid(3 * w - 1, 3 * w + 1);
      Grid ra = make_grid(w, 2 * w + 1);
      Grid rb = make_grid(2 * w - 1, w);
      for (Index j = 0; j < w; ++j) {
        const auto& e = nth(sys, m, j);
        at(lhs, 2 * j, 2 * j) = {e.C};
        at(lhs, 2 * j, 2 * j + 1) = {e.E, alt_sign(j)};
        at(lhs, 2 * j, 2 * j + 2) = {e.F};
        at(lhs, 2 * j, 2 * w + 1 + j) = {e.A};
        at(lhs, 2 * w - 1 + j, 2 * j + 1) = {e.B};
        at(ra, j, j) = {e.C};
        at(ra, j, j + 1) = {e.F};
        at(ra, j, w + 1 + j) = {e.A};
        at(rb, w - 1 + j, j) = {e.B};
      }
      for (Index j = 0; j + 1 < w; ++j) {
        const auto& e = nth(sys, m, j);
        const auto& e1 = nth(sys, m, j + 1);
        at(lhs, 2 * j + 1, 2 * j + 1) = {e.G};
        at(lhs, 2 * j + 1, 2 * j + 3) = {e1.D};
        at(rb, j, j) = {e.G};
        at(rb, j, j + 1) = {e1.D};
      }
      out.lhs = finish(std::move(lhs));
      out.rhs_a = finish(std::move(ra));
      out.rhs_b = finish(std::move(rb));
      break;
    }
    case ConditionFamily::eq5: {
      // Neither C_m nor F_n appears as a column; D_m tops and G_n bottoms the
      // row ladder instead.
      Grid lhs = make_grid(3 * w + 1, 3 * w - 1);
      Grid ra = make_grid(w, 2 * w - 1);
      Grid rb = make_grid(2 * w + 1, w);
      at(lhs, 0, 0) = {nth(sys, m, 0).D};
      at(rb, 0, 0) = {nth(sys, m, 0).D};
      for (Index j = 0; j < w; ++j) {
        const auto& e = nth(sys, m, j);
        if (j >= 1) {
          at(lhs, 1 + 2 * j, 2 * j - 1) = {e.C};
          at(ra, j, j - 1) = {e.C};
        }
        at(lhs, 1 + 2 * j, 2 * j) = {e.E, alt_sign(j)};
        if (j + 1 < w) {
          at(lhs, 1 + 2 * j, 2 * j + 1) = {e.F};
          at(ra, j, j) = {e.F};
        }
        at(lhs, 1 + 2 * j, 2 * w - 1 + j) = {e.A};
        at(ra, j, w - 1 + j) = {e.A};
        at(lhs, 2 * w + 1 + j, 2 * j) = {e.B};
        at(rb, w + 1 + j, j) = {e.B};
      }
      for (Index j = 0; j + 1 < w; ++j) {
        const auto& e = nth(sys, m, j);
        const auto& e1 = nth(sys, m, j + 1);
        at(lhs, 2 + 2 * j, 2 * j) = {e.G};
        at(lhs, 2 + 2 * j, 2 * j + 2) = {e1.D};
        at(rb, 1 + j, j) = {e.G};
        at(rb, 1 + j, j + 1) = {e1.D};
      }
      at(lhs, 2 * w, 2 * w - 2) = {nth(sys, m, w - 1).G};
      at(rb, w, w - 1) = {nth(sys, m, w - 1).G};
      out.lhs = finish(std::move(lhs));
      out.rhs_a = finish(std::move(ra));
      out.rhs_b = finish(std::move(rb));
      break;
    }
    case ConditionFamily::eq6: {
      // C_m in the columns, G_n in the rows: F_n and D_m drop out entirely.
      Grid lhs = make_grid(3 * w, 3 * w);
      Grid ra = make_grid(w, 2 * w);
      Grid rb = make_grid(2 * w, w);
      for (Index j = 0; j < w; ++j) {
        const auto& e = nth(sys, m, j);
        at(lhs, 2 * j, 2 * j) = {e.C};
        at(ra, j, j) = {e.C};
        at(lhs, 2 * j, 2 * j + 1) = {e.E, alt_sign(j)};
        if (j + 1 < w) {
          at(lhs, 2 * j, 2 * j + 2) = {e.F};
          at(ra, j, j + 1) = {e.F};
        }
        at(lhs, 2 * j, 2 * w + j) = {e.A};
        at(ra, j, w + j) = {e.A};
        at(lhs, 2 * w + j, 2 * j + 1) = {e.B};
        at(rb, w + j, j) = {e.B};
      }
      for (Index j = 0; j + 1 < w; ++j) {
        const auto& e = nth(sys, m, j);
        const auto& e1 = nth(sys, m, j + 1);
        at(lhs, 2 * j + 1, 2 * j + 1) = {e.G};
        at(lhs, 2 * j + 1, 2 * j + 3) = {e1.D};
        at(rb, j, j) = {e.G};
        at(rb, j, j + 1) = {e1.D};
      }
      at(lhs, 2 * w - 1, 2 * w - 1) = {nth(sys, m, w - 1).G};
      at(rb, w - 1, w - 1) = {nth(sys, m, w - 1).G};
      out.lhs = finish(std::move(lhs));
      out.rhs_a = finish(std::move(ra));
      out.rhs_b = finish(std::move(rb));
      break;
    }
    default: {  // eq7: F_n in the columns, D_m in the rows.
      Grid lhs = make_grid(3 * w, 3 * w);
      Grid ra = make_grid(w, 2 * w);
      Grid rb = make_grid(2 * w, w);
      at(lhs, 0, 0) = {nth(sys, m, 0).D};
      at(rb, 0, 0) = {nth(sys, m, 0).D};
      for (Index j = 0; j < w; ++j) {
        const auto& e = nth(sys, m, j);
        if (j >= 1) {
          at(lhs, 1 + 2 * j, 2 * j - 1) = {e.C};
          at(ra, j, j - 1) = {e.C};
        }
        at(lhs, 1 + 2 * j, 2 * j) = {e.E, alt_sign(j)};
        at(lhs, 1 + 2 * j, 2 * j + 1) = {e.F};
        at(ra, j, j) = {e.F};
        at(lhs, 1 + 2 * j, 2 * w + j) = {e.A};
        at(ra, j, w + j) = {e.A};
        at(lhs, 2 * w + j, 2 * j) = {e.B};
        at(rb, w + j, j) = {e.B};
      }
      for (Index j = 0; j + 1 < w; ++j) {
        const auto& e = nth(sys, m, j);
        const auto& e1 = nth(sys, m, j + 1);
        at(lhs, 2 + 2 * j, 2 * j) = {e.G};
        at(lhs, 2 + 2 * j, 2 * j + 2) = {e1.D};
        at(rb, 1 + j, j) = {e.G};
        at(rb, 1 + j, j + 1) = {e1.D};
      }
      out.lhs = finish(std::move(lhs));
      out.rhs_a = finish(std::move(ra));
      out.rhs_b = finish(std::move(rb));
      break;
    }
  }
  return out;
}

}  // namespace

ConditionParts build_condition(const SylvesterSystem& sys, ConditionFamily family, Index m,
                               Index n) {
  sys.validate();
  if (m < 1 || n > sys.k() || m > n) {
    throw BadWindow("window [" + std::to_string(m) + ", " + std::to_string(n) +
                    "] is out of range for k = " + std::to_string(sys.k()));
  }
  if (!is_window_family(family) && m != n) {
    throw BadWindow(std::string(family_name(family)) + " is a per-equation family; m must equal n");
  }
  if (!is_window_family(family)) {
    return build_single(sys.eqs[static_cast<std::size_t>(m - 1)], family);
  }
  return build_window(sys, family, m, n);
}

RankCondition evaluate_condition(const SylvesterSystem& sys, ConditionFamily family, Index m,
                                 Index n, std::optional<double> tol_rank) {
  const ConditionParts parts = build_condition(sys, family, m, n);
  const RankResult lhs = rank(parts.lhs, tol_rank);
  const RankResult ra = rank(parts.rhs_a, tol_rank);
  const RankResult rb = rank(parts.rhs_b, tol_rank);
  RankCondition out;
  out.family = family;
  out.m = m;
  out.n = n;
  out.lhs_rank = lhs.rank;
  out.rhs_rank = ra.rank + rb.rank;
  out.margin_lhs = rank_margin(lhs);
  out.margin_rhs = std::min(rank_margin(ra), rank_margin(rb));
  out.pass = out.lhs_rank == out.rhs_rank;
  return out;
}

ConsistencyReport check_system(const SylvesterSystem& sys, std::optional<double> tol_rank) {
  sys.validate();
  ConsistencyReport out;
  const Index k = sys.k();
  for (Index i = 1; i <= k; ++i) {
    for (ConditionFamily fam : {ConditionFamily::eq2a, ConditionFamily::eq2b,
                                ConditionFamily::eq3a, ConditionFamily::eq3b}) {
      out.conditions.push_back(evaluate_condition(sys, fam, i, i, tol_rank));
    }
  }
  for (Index m = 1; m <= k; ++m) {
    for (Index n = m; n <= k; ++n) {
      for (ConditionFamily fam : {ConditionFamily::eq4, ConditionFamily::eq5,
                                  ConditionFamily::eq6, ConditionFamily::eq7}) {
        out.conditions.push_back(evaluate_condition(sys, fam, m, n, tol_rank));
      }
    }
  }
  out.consistent = true;
  for (const auto& c : out.conditions) out.consistent = out.consistent && c.pass;
  return out;
}

namespace {

/// Hatted system tying consecutive equations: its unknowns are the free
/// parameter blocks of the per-equation solutions, and its equation i states
/// that equations i and i+1 agree on their shared Z.
SylvesterSystem build_hatted(const SylvesterSystem& sys, const std::vector<EquationAux>& aux) {
  SylvesterSystem hat;
  for (Index i = 0; i + 1 < sys.k(); ++i) {
    const EquationAux& cur = aux[static_cast<std::size_t>(i)];
    const EquationAux& nxt = aux[static_cast<std::size_t>(i + 1)];
    FourTermEquation h;
    // The hatted coefficients are cancellation-prone products; snapping them
    // keeps degenerate instances exact through the recursion.
    h.A = hstack({snapped(cur.mm.l * cur.ss.l, fro_norm(cur.mm.l) * fro_norm(cur.ss.l)),
                  -(nxt.rc.l)});
    h.B = vstack({cur.gl.r, -(nxt.dl.r)});
    h.C = cur.mm.l;
    h.D = cur.nn.r;
    h.F = snapped(nxt.rc.pinv * nxt.ss.mat, fro_norm(nxt.rc.pinv) * fro_norm(nxt.ss.mat));
    h.G = snapped(nxt.nn.r * (nxt.gl.mat * nxt.dl.pinv),
                  fro_norm(nxt.gl.mat) * fro_norm(nxt.dl.pinv));
    h.E = z_particular(nxt) - zp_particular(cur);
    hat.eqs.push_back(std::move(h));
  }
  return hat;
}

std::vector<EquationAux> aux_checked(const SylvesterSystem& sys, const SolveOptions& opts,
                                     int level) {
  std::vector<EquationAux> aux;
  aux.reserve(static_cast<std::size_t>(sys.k()));
  for (Index i = 0; i < sys.k(); ++i) {
    aux.push_back(equation_aux(sys.eqs[static_cast<std::size_t>(i)], opts.tol_rank));
    const EquationConsistency cons = equation_consistent(aux.back(), opts.tol_res);
    if (!cons.pass) {
      throw InconsistentEquation(i, cons,
                                 "projector conditions failed at reduction level " +
                                     std::to_string(level) + ", " + eq_label(i));
    }
  }
  return aux;
}

SystemSolution solve_rec(const SylvesterSystem& sys, const SolveOptions& opts, Rng* prng,
                         SolveStats* stats, int level) {
  const Index k = sys.k();
  const std::vector<EquationAux> aux = aux_checked(sys, opts, level);

  std::vector<FreeParams> t;
  t.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
    t.push_back(prng ? FreeParams::random(eq, *prng) : FreeParams::zeros(eq));
  }

  if (k > 1) {
    const SylvesterSystem hatted = build_hatted(sys, aux);
    const SystemSolution hsol = solve_rec(hatted, opts, prng, nullptr, level + 1);
    // The hatted unknowns are parameter blocks of the original equations:
    // X-hat stacks (t1 of i, t4 of i+1), Y-hat concatenates (t3 of i, t5 of
    // i+1), and the hatted Z chain is t2. The blocks not covered here stay at
    // their defaults drawn above.
    for (Index i = 0; i + 1 < k; ++i) {
      const Index fi = sys.eqs[static_cast<std::size_t>(i)].f();
      const Index gi = sys.eqs[static_cast<std::size_t>(i)].g();
      const QuatMatrix& xh = hsol.X[static_cast<std::size_t>(i)];
      const QuatMatrix& yh = hsol.Y[static_cast<std::size_t>(i)];
      FreeParams& ti = t[static_cast<std::size_t>(i)];
      FreeParams& tn = t[static_cast<std::size_t>(i + 1)];
      for (Index r = 0; r < fi; ++r)
        for (Index cidx = 0; cidx < gi; ++cidx) {
          ti.t1(r, cidx) = xh(r, cidx);
          tn.t4(r, cidx) = xh(fi + r, cidx);
          ti.t3(r, cidx) = yh(r, cidx);
          tn.t5(r, cidx) = yh(r, gi + cidx);
        }
    }
    for (Index i = 0; i < k; ++i) t[static_cast<std::size_t>(i)].t2 = hsol.Z[static_cast<std::size_t>(i)];
  }

  SystemSolution sol;
  sol.X.resize(static_cast<std::size_t>(k));
  sol.Y.resize(static_cast<std::size_t>(k));
  sol.Z.resize(static_cast<std::size_t>(k + 1));
  std::vector<QuatMatrix> zp(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    auto [z, z2] = solve_equation_z(aux[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)]);
    sol.Z[static_cast<std::size_t>(i)] = std::move(z);
    zp[static_cast<std::size_t>(i)] = std::move(z2);
  }
  sol.Z[static_cast<std::size_t>(k)] = zp[static_cast<std::size_t>(k - 1)];
  if (stats) {
    stats->shared_z_gaps.clear();
    for (Index i = 0; i + 1 < k; ++i) {
      stats->shared_z_gaps.push_back(
          fro_norm(zp[static_cast<std::size_t>(i)] - sol.Z[static_cast<std::size_t>(i + 1)]));
    }
  }
  for (Index i = 0; i < k; ++i) {
    auto [x, y] = solve_equation_xy(sys.eqs[static_cast<std::size_t>(i)],
                                    aux[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)],
                                    sol.Z[static_cast<std::size_t>(i)],
                                    sol.Z[static_cast<std::size_t>(i + 1)]);
    sol.X[static_cast<std::size_t>(i)] = std::move(x);
    sol.Y[static_cast<std::size_t>(i)] = std::move(y);
  }
  return sol;
}

std::string describe_failure(const ConsistencyReport& rep) {
  for (const auto& c : rep.conditions) {
    if (!c.pass) {
      return std::string("inconsistent system: family ") + family_name(c.family) + " on window [" +
             std::to_string(c.m) + ", " + std::to_string(c.n) + "] has lhs rank " +
             std::to_string(c.lhs_rank) + " but rhs rank " + std::to_string(c.rhs_rank);
    }
  }
  return "solution residual exceeded tolerance although every rank condition passed; "
         "the instance sits at the edge of the rank cutoff";
}

}  // namespace

Reduction reduce_system(const SylvesterSystem& sys, std::optional<double> tol_rank,
                        double tol_res) {
  sys.validate();
  Reduction out;
  SolveOptions opts;
  opts.tol_rank = tol_rank;
  opts.tol_res = tol_res;
  out.aux = aux_checked(sys, opts, 0);
  if (sys.k() > 1) {
    out.hatted = build_hatted(sys, out.aux);
    for (Index i = 0; i + 1 < sys.k(); ++i) {
      out.split_rows.push_back(sys.eqs[static_cast<std::size_t>(i)].f());
      out.split_cols.push_back(sys.eqs[static_cast<std::size_t>(i)].g());
    }
  }
  return out;
}

SystemSolution solve_system(const SylvesterSystem& sys, const SolveOptions& opts,
                            SolveStats* stats) {
  sys.validate();
  try {
    std::optional<Rng> rng;
    if (opts.param_seed) rng.emplace(*opts.param_seed);
    SystemSolution sol = solve_rec(sys, opts, rng ? &*rng : nullptr, stats, 0);
    sol.residuals = residuals(sys, sol);
    for (Index i = 0; i < sys.k(); ++i) {
      const double scale = 1.0 + fro_norm(sys.eqs[static_cast<std::size_t>(i)].E);
      if (!(sol.residuals[static_cast<std::size_t>(i)] <= opts.tol_solution * scale)) {
        throw InconsistentEquation(i, EquationConsistency{},
                                   "solution residual " +
                                       std::to_string(sol.residuals[static_cast<std::size_t>(i)]) +
                                       " exceeds tolerance at " + eq_label(i));
      }
    }
    return sol;
  } catch (const InconsistentEquation& e) {
    ConsistencyReport rep = check_system(sys, opts.tol_rank);
    const std::string msg = describe_failure(rep) + " (" + e.what() + ")";
    throw InconsistentSystem(std::move(rep), msg);
  }
}

std::vector<double> residuals(const SylvesterSystem& sys, const SystemSolution& sol) {
  sys.validate();
  const Index k = sys.k();
  require(static_cast<Index>(sol.X.size()) == k, "solution must have k X blocks");
  require(static_cast<Index>(sol.Y.size()) == k, "solution must have k Y blocks");
  require(static_cast<Index>(sol.Z.size()) == k + 1, "solution must have k + 1 Z blocks");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
    const auto& x = sol.X[static_cast<std::size_t>(i)];
    const auto& y = sol.Y[static_cast<std::size_t>(i)];
    const auto& z = sol.Z[static_cast<std::size_t>(i)];
    const auto& zn = sol.Z[static_cast<std::size_t>(i + 1)];
    require(x.rows() == eq.a() && x.cols() == eq.q(), eq_label(i) + ": X block has wrong shape");
    require(y.rows() == eq.p() && y.cols() == eq.b(), eq_label(i) + ": Y block has wrong shape");
    require(z.rows() == eq.c() && z.cols() == eq.d(), eq_label(i) + ": Z block has wrong shape");
    require(zn.rows() == eq.f() && zn.cols() == eq.g(),
            eq_label(i) + ": trailing Z block has wrong shape");
    const QuatMatrix lhs = eq.A * x + y * eq.B + eq.C * z * eq.D + eq.F * zn * eq.G;
    out.push_back(fro_norm(lhs - eq.E));
  }
  return out;
}

}  // namespace qsylv
