#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qsylv/quat_matrix.hpp"

namespace qsylv {

using ComplexMatrix = Eigen::MatrixXcd;

/// Complex embedding of a quaternion matrix. Writing A = A1 + A2 j with
/// complex A1, A2 (the w + x i and y + z i parts), the embedding of an
/// m x n matrix is the 2m x 2n complex matrix
///
///   [  A1        A2      ]
///   [ -conj(A2)  conj(A1) ]
///
/// It is an algebra homomorphism that turns conjugate transposition into the
/// Hermitian transpose, so ranks, singular values and pseudoinverses of
/// quaternion matrices can be computed through it.
ComplexMatrix complex_adjoint(const QuatMatrix& a);

/// Inverse of the embedding, averaging the two redundant copies so small
/// structural asymmetries introduced by floating point round off are removed.
/// Throws ShapeError when the input dimensions are odd.
QuatMatrix adjoint_inverse(const ComplexMatrix& c);

/// Default rank cutoff: max(rows, cols) * sigma_max * 2^-40, in terms of the
/// quaternion dimensions of the matrix.
double default_rank_tol(Index rows, Index cols, double sigma_max);

struct RankResult {
  Index rank = 0;
  /// De-duplicated singular values, descending. The embedding doubles every
  /// singular value; each entry here is the average of one pair.
  std::vector<double> singular_values;
  double tol_used = 0.0;
};

RankResult rank(const QuatMatrix& a, std::optional<double> tol = std::nullopt);

/// Moore-Penrose inverse via the complex embedding. Singular values at or
/// below the cutoff are treated as zero pairwise, so the result is again a
/// valid embedding.
QuatMatrix pinv(const QuatMatrix& a, std::optional<double> tol = std::nullopt);

/// Orthogonal projectors onto the complements of the row and column spaces:
/// l = I - pinv(a) a annihilates a from the right (a * l = 0),
/// r = I - a pinv(a) annihilates a from the left  (r * a = 0).
struct Projectors {
  QuatMatrix l;
  QuatMatrix r;
};

Projectors projectors(const QuatMatrix& a, std::optional<double> tol = std::nullopt);

/// Classical rank additivity identities for partitioned matrices:
///   rank(A) + rank((I - A pinv(A)) B) = rank([A B])
///   rank(A) + rank(C (I - pinv(A) A)) = rank([A; C])
/// Preconditions: b has the row count of a, c has the column count of a.
struct MarsagliaStyanRanks {
  Index lhs_cols = 0;  ///< rank(A) + rank(R_A B)
  Index rhs_cols = 0;  ///< rank([A B])
  Index lhs_rows = 0;  ///< rank(A) + rank(C L_A)
  Index rhs_rows = 0;  ///< rank([A; C])
};

MarsagliaStyanRanks marsaglia_styan_ranks(const QuatMatrix& a, const QuatMatrix& b,
                                          const QuatMatrix& c,
                                          std::optional<double> tol = std::nullopt);

/// Separation of the rank decision from its cutoff: the smaller of
/// (smallest counted singular value) / cutoff and cutoff / (largest
/// discarded singular value). Missing sides count as infinitely separated;
/// the result is capped so it stays representable in JSON.
double rank_margin(const RankResult& r);

}  // namespace qsylv
