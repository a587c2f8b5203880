#pragma once

#include <optional>
#include <vector>

#include "qsylv/quat_matrix.hpp"
#include "qsylv/quaternion.hpp"
#include "qsylv/sylvester.hpp"

namespace qsylv {

/// One equation of the phi-structured chain
///   A X + (A X)_phi + C Z C_phi + F Z' F_phi = E
/// where M_phi applies the involution entrywise to the transpose. E must be
/// square and phi-Hermitian; the unknowns Z, Z' are square and constrained to
/// be phi-Hermitian themselves.
struct PhiEquation {
  QuatMatrix A, C, F, E;

  Index p() const { return E.rows(); }
  Index a() const { return A.cols(); }
  Index c() const { return C.cols(); }
  Index f() const { return F.cols(); }
};

struct PhiSystem {
  Involution phi;
  std::vector<PhiEquation> eqs;

  Index k() const { return static_cast<Index>(eqs.size()); }

  /// Checks shapes, the chain coupling c_{i+1} == f_i, and that each E is
  /// phi-Hermitian to within 1e-12 relative.
  void validate() const;
};

struct PhiHermitianCheck {
  bool pass = false;
  double defect = 0.0;  // |a - a_phi|_F
};

/// Throws NonSquare for rectangular input. tol is relative to 1 + |a|_F.
PhiHermitianCheck phi_hermitian_check(const Involution& phi, const QuatMatrix& a,
                                      double tol = 1e-10);

/// The unconstrained chained system with B = A_phi, D = C_phi, G = F_phi.
SylvesterSystem to_general_system(const PhiSystem& ps);

/// Rank conditions for phi-structured solvability. The involution pairs the
/// condition families (EQ2a with EQ2b, EQ3a with EQ3b, EQ4 with EQ5, EQ6
/// with EQ7), so by default one representative of each window pair plus the
/// unpaired per-equation representatives are evaluated: EQ2a, EQ3a per
/// equation and EQ4, EQ5 per window. strict adds EQ6 and EQ7, which are
/// implied but whose evaluation guards against rank-tolerance borderline
/// cases.
ConsistencyReport check_phi_system(const PhiSystem& ps,
                                   std::optional<double> tol_rank = std::nullopt,
                                   bool strict = false);

struct PhiSolution {
  std::vector<QuatMatrix> X;  // k blocks, a_i x p_i
  std::vector<QuatMatrix> Z;  // k + 1 blocks, phi-Hermitian
  std::vector<double> residuals;
};

/// Solves via the unconstrained system and symmetrizes:
///   X_i = (X_i' + (Y_i')_phi) / 2,  Z_i = (Z_i' + (Z_i')_phi) / 2.
PhiSolution solve_phi_system(const PhiSystem& ps, const SolveOptions& opts = {},
                             SolveStats* stats = nullptr);

/// Per-equation residuals |A X + (A X)_phi + C Z C_phi + F Z' F_phi - E|_F.
std::vector<double> phi_residuals(const PhiSystem& ps, const PhiSolution& sol);

}  // namespace qsylv
