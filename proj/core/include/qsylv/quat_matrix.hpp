#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qsylv/quaternion.hpp"

namespace qsylv {

using Index = std::ptrdiff_t;

/// Dense quaternion matrix, row major. Zero-dimension matrices (0 x n, m x 0)
/// are legal values and behave consistently under every operation.
class QuatMatrix {
 public:
  QuatMatrix() = default;

  QuatMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
      throw ShapeError("matrix dimensions must be nonnegative");
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), Quaternion());
  }

  static QuatMatrix zeros(Index rows, Index cols) { return QuatMatrix(rows, cols); }

  static QuatMatrix identity(Index n) {
    QuatMatrix out(n, n);
    for (Index i = 0; i < n; ++i) out(i, i) = Quaternion::real(1.0);
    return out;
  }

  /// Convenience constructor for small literals; rows must have equal length.
  static QuatMatrix from_rows(std::initializer_list<std::initializer_list<Quaternion>> rows);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Quaternion& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Quaternion& operator()(Index i, Index j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  friend bool operator==(const QuatMatrix&, const QuatMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Quaternion> data_;
};

QuatMatrix operator+(const QuatMatrix& a, const QuatMatrix& b);
QuatMatrix operator-(const QuatMatrix& a, const QuatMatrix& b);
QuatMatrix operator-(const QuatMatrix& a);
QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b);
QuatMatrix operator*(double s, const QuatMatrix& a);
QuatMatrix operator*(const QuatMatrix& a, double s);
/// Entrywise left scalar multiple q * a(i,j); order matters over the quaternions.
QuatMatrix operator*(const Quaternion& q, const QuatMatrix& a);
QuatMatrix operator*(const QuatMatrix& a, const Quaternion& q);

QuatMatrix transpose(const QuatMatrix& a);
QuatMatrix conj_transpose(const QuatMatrix& a);
/// Applies the involution entrywise to the transpose.
QuatMatrix phi_transpose(const Involution& phi, const QuatMatrix& a);

double fro_norm(const QuatMatrix& a);

QuatMatrix hstack(const std::vector<QuatMatrix>& parts);
QuatMatrix vstack(const std::vector<QuatMatrix>& parts);

/// One cell of a block grid: either a structural zero whose dimensions are
/// inferred from its row and column, or a +-1 signed matrix.
struct BlockCell {
  enum class Kind { zero, mat };

  BlockCell() = default;
  BlockCell(QuatMatrix m, int sign_ = 1) : kind(Kind::mat), mat(std::move(m)), sign(sign_) {
    if (sign_ != 1 && sign_ != -1) throw ShapeError("block cell sign must be +1 or -1");
  }

  Kind kind = Kind::zero;
  QuatMatrix mat;
  int sign = 1;
};

/// Rectangular grid of cells describing a block matrix.
struct BlockSpec {
  std::vector<std::vector<BlockCell>> cells;
};

/// Assembles a block matrix. Every grid row and column must contain at least
/// one sized cell so zero-cell dimensions can be inferred; inconsistent sizes
/// or a ragged grid raise ShapeError.
QuatMatrix assemble_block(const BlockSpec& spec);

}  // namespace qsylv
