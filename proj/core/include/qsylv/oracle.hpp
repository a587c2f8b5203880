#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qsylv/phi.hpp"
#include "qsylv/quat_matrix.hpp"
#include "qsylv/sylvester.hpp"

namespace qsylv {

/// Placement of one quaternion unknown inside the realified vector. Entries
/// are laid out row-major, four real components [w, x, y, z] per entry.
struct UnknownBlock {
  enum class Kind { x, y, z };
  Kind kind = Kind::x;
  Index index = 0;  // 0-based within its kind
  Index rows = 0, cols = 0;
  Index offset = 0;  // first real column
};

/// The system as one real matrix equation m u = b over the stacked real
/// components of all unknowns. Used as an independent cross-check: it shares
/// no rank, pseudoinverse, or solver machinery with the quaternion path.
struct RealLinearSystem {
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
  std::vector<UnknownBlock> layout;
};

/// Unknown order X_1..X_k, Y_1..Y_k, Z_1..Z_{k+1}; one row block of
/// 4 p_i q_i equations per system equation.
RealLinearSystem realify(const SylvesterSystem& sys);

/// Unknown order X_1..X_k, Z_1..Z_{k+1}. After the equation rows, each Z_j
/// contributes 4 s_j^2 homogeneous rows enforcing Z_j = (Z_j)_phi.
RealLinearSystem realify(const PhiSystem& ps);

struct OracleVerdict {
  bool consistent = false;
  Index rank_m = 0, rank_mb = 0;
  double tol_m = 0.0, tol_mb = 0.0;
};

/// Consistent iff appending b to m does not raise the rank.
OracleVerdict oracle_consistent(const RealLinearSystem& rls);

struct OracleSolve {
  Eigen::VectorXd x;
  double residual = 0.0;  // |m x - b|_2
};

/// Minimum-norm least-squares solution of the realified system.
OracleSolve oracle_solve(const RealLinearSystem& rls);

/// Orthonormal basis of the left null space of m, one column per dimension.
Eigen::MatrixXd left_nullspace(const Eigen::MatrixXd& m);

/// Reassembles quaternion blocks from a realified solution vector and
/// recomputes the residuals.
SystemSolution unpack_solution(const SylvesterSystem& sys, const RealLinearSystem& rls,
                               const Eigen::VectorXd& x);
PhiSolution unpack_phi_solution(const PhiSystem& ps, const RealLinearSystem& rls,
                                const Eigen::VectorXd& x);

}  // namespace qsylv
