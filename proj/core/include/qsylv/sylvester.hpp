#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsylv/linalg.hpp"

namespace qsylv {

/// One four-term equation  A X + Y B + C Z D + F Z' G = E  in the unknowns
/// X, Y, Z, Z'. With E of size p x q the coefficient shapes are
/// A: p x a, B: b x q, C: p x c, D: d x q, F: p x f, G: g x q, and the
/// unknowns are X: a x q, Y: p x b, Z: c x d, Z': f x g. Any of the inner
/// dimensions a, b, c, d, f, g may be zero.
struct FourTermEquation {
  QuatMatrix A, B, C, D, F, G, E;

  Index p() const { return E.rows(); }
  Index q() const { return E.cols(); }
  Index a() const { return A.cols(); }
  Index b() const { return B.rows(); }
  Index c() const { return C.cols(); }
  Index d() const { return D.rows(); }
  Index f() const { return F.cols(); }
  Index g() const { return G.rows(); }

  void validate() const;
};

/// Chain of four-term equations sharing consecutive Z unknowns: equation i
/// couples Z_i and Z_{i+1}, so equation i+1 must have (c, d) equal to the
/// (f, g) of equation i. A system of k equations has k + 1 Z unknowns.
struct SylvesterSystem {
  std::vector<FourTermEquation> eqs;

  Index k() const { return static_cast<Index>(eqs.size()); }
  void validate() const;
};

/// A matrix bundled with its pseudoinverse and the two projectors
/// l = I - pinv * mat and r = I - mat * pinv.
struct PinvBundle {
  QuatMatrix mat;
  QuatMatrix pinv;
  QuatMatrix l;
  QuatMatrix r;
};

PinvBundle make_pinv_bundle(QuatMatrix mat, std::optional<double> tol = std::nullopt);

/// Derived data for one equation. Compressing by the projectors of A and B
/// removes the X and Y terms:
///   (R_A C) Z (D L_B) + (R_A F) Z' (G L_B) = R_A E L_B
/// with R_A = I - A pinv(A), L_B = I - pinv(B) B. A second stage compresses
/// the Z' term against the Z term:
///   mm = R_rc rf,  nn = gl L_dl,  ss = rf L_mm.
struct EquationAux {
  PinvBundle a, b;                  // the equation's A and B
  PinvBundle rc, dl, rf, gl;        // R_A C, D L_B, R_A F, G L_B
  QuatMatrix re;                    // R_A E L_B
  PinvBundle mm, nn, ss;            // second stage
};

EquationAux equation_aux(const FourTermEquation& eq, std::optional<double> tol = std::nullopt);

/// The four projector conditions equivalent to solvability of one equation.
/// Each residual is a Frobenius norm that vanishes exactly when the equation
/// is consistent; the gate is residual <= tol_res * (1 + |R_A E L_B|_F).
struct EquationConsistency {
  std::array<double, 4> residuals{};
  double threshold = 0.0;
  bool pass = false;
};

EquationConsistency equation_consistent(const EquationAux& aux, double tol_res = 1e-10);

class Rng;

/// Free parameters of the general solution of one equation.
/// Shapes: t1, t2, t3: f x g; t4, t5: c x d; t6: a x q; t7: a x b; t8: p x b.
struct FreeParams {
  QuatMatrix t1, t2, t3, t4, t5, t6, t7, t8;

  static FreeParams zeros(const FourTermEquation& eq);
  static FreeParams random(const FourTermEquation& eq, Rng& rng);
};

struct EquationSolution {
  QuatMatrix x, y, z, zp;
};

/// General solution of one consistent equation; every choice of free
/// parameters gives a solution and every solution arises this way.
EquationSolution solve_equation(const FourTermEquation& eq, const EquationAux& aux,
                                const FreeParams& t);

enum class ConditionFamily { eq2a, eq2b, eq3a, eq3b, eq4, eq5, eq6, eq7 };

/// Wire name of a family ("EQ2a" .. "EQ7").
const char* family_name(ConditionFamily f);
std::optional<ConditionFamily> family_from_name(const std::string& name);

/// True for the four families defined on index windows [m, n]; the others
/// are per-equation conditions and require m == n.
bool is_window_family(ConditionFamily f);

/// The three block matrices of one rank condition: the condition holds when
/// rank(lhs) == rank(rhs_a) + rank(rhs_b). Window indices are 1-based and
/// inclusive; per-equation families require m == n.
struct ConditionParts {
  QuatMatrix lhs, rhs_a, rhs_b;
};

ConditionParts build_condition(const SylvesterSystem& sys, ConditionFamily family, Index m,
                               Index n);

struct RankCondition {
  ConditionFamily family = ConditionFamily::eq2a;
  Index m = 0, n = 0;  // 1-based window, inclusive
  Index lhs_rank = 0, rhs_rank = 0;
  double margin_lhs = 0.0, margin_rhs = 0.0;
  bool pass = false;
};

struct ConsistencyReport {
  std::vector<RankCondition> conditions;
  bool consistent = false;
};

/// Evaluates every rank condition: the four per-equation families at each
/// index and the four window families on every window 1 <= m <= n <= k
/// (width-one windows duplicate the per-equation families; the duplication is
/// kept for audit clarity).
ConsistencyReport check_system(const SylvesterSystem& sys,
                               std::optional<double> tol_rank = std::nullopt);

/// Evaluates a single condition.
RankCondition evaluate_condition(const SylvesterSystem& sys, ConditionFamily family, Index m,
                                 Index n, std::optional<double> tol_rank = std::nullopt);

/// An individually inconsistent equation was encountered (index is 0-based
/// within the system handed to the failing routine).
struct InconsistentEquation : Error {
  InconsistentEquation(Index index_, const EquationConsistency& cons_, const std::string& msg)
      : Error(msg), index(index_), cons(cons_) {}
  Index index;
  EquationConsistency cons;
};

/// The system has no solution; carries the full condition report.
struct InconsistentSystem : Error {
  InconsistentSystem(ConsistencyReport report_, const std::string& msg)
      : Error(msg), report(std::move(report_)) {}
  ConsistencyReport report;
};

/// Result of eliminating the chain couplings once: a system with k - 1
/// equations in the free parameters of the original per-equation solutions.
/// Solving it pins, for each original equation, the parameter blocks that
/// make consecutive equations agree on their shared Z.
struct Reduction {
  SylvesterSystem hatted;              // k - 1 equations; empty when k == 1
  std::vector<EquationAux> aux;        // per original equation
  std::vector<Index> split_rows;       // hatted X_i splits at f_i rows
  std::vector<Index> split_cols;       // hatted Y_i splits at g_i columns
};

/// Requires every equation to be individually consistent
/// (InconsistentEquation otherwise).
Reduction reduce_system(const SylvesterSystem& sys, std::optional<double> tol_rank = std::nullopt,
                        double tol_res = 1e-10);

struct SolveOptions {
  std::optional<double> tol_rank;           // rank / pinv cutoff override
  double tol_res = 1e-10;                   // per-equation condition gate
  double tol_solution = 1e-8;               // residual acceptance, relative
  std::optional<std::uint64_t> param_seed;  // draw free parameters when set
};

struct SolveStats {
  /// |Z_{i+1} recomputed at equation i  -  Z_{i+1} computed at equation i+1|,
  /// one entry per interior coupling.
  std::vector<double> shared_z_gaps;
};

struct SystemSolution {
  std::vector<QuatMatrix> X, Y;  // k entries each
  std::vector<QuatMatrix> Z;     // k + 1 entries
  std::vector<double> residuals; // per-equation Frobenius residuals
};

/// Solves the chained system by recursive reduction. Free parameters default
/// to zero at every recursion level; with param_seed set they are drawn
/// standard normal instead. Raises InconsistentSystem (with the full rank
/// condition report) when any level fails its consistency gate or the final
/// residuals exceed tol_solution * (1 + |E_i|_F).
SystemSolution solve_system(const SylvesterSystem& sys, const SolveOptions& opts = {},
                            SolveStats* stats = nullptr);

/// Per-equation residuals |A X + Y B + C Z D + F Z' G - E|_F of a candidate
/// solution; shapes are validated against the system.
std::vector<double> residuals(const SylvesterSystem& sys, const SystemSolution& sol);

}  // namespace qsylv
