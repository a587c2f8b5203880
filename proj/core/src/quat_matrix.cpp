#include "qsylv/quat_matrix.hpp"

#include <cmath>
#include <string>

namespace qsylv {

namespace {

std::string dims(const QuatMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const QuatMatrix& a, const QuatMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + dims(a) + " vs " + dims(b));
  }
}

}  // namespace

QuatMatrix QuatMatrix::from_rows(std::initializer_list<std::initializer_list<Quaternion>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r == 0 ? 0 : static_cast<Index>(rows.begin()->size());
  QuatMatrix out(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != c) throw ShapeError("from_rows: ragged rows");
    Index j = 0;
    for (const auto& q : row) out(i, j++) = q;
    ++i;
  }
  return out;
}

QuatMatrix operator+(const QuatMatrix& a, const QuatMatrix& b) {
  require_same_shape(a, b, "add");
  QuatMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

QuatMatrix operator-(const QuatMatrix& a, const QuatMatrix& b) {
  require_same_shape(a, b, "subtract");
  QuatMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

QuatMatrix operator-(const QuatMatrix& a) {
  QuatMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = -a(i, j);
  return out;
}

QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("multiply: inner dimensions " + dims(a) + " vs " + dims(b));
  }
  QuatMatrix out(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = 0; k < a.cols(); ++k) {
      const Quaternion aik = a(i, k);
      for (Index j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

QuatMatrix operator*(double s, const QuatMatrix& a) {
  QuatMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  return out;
}

QuatMatrix operator*(const QuatMatrix& a, double s) { return s * a; }

QuatMatrix operator*(const Quaternion& q, const QuatMatrix& a) {
  QuatMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = q * a(i, j);
  return out;
}

QuatMatrix operator*(const QuatMatrix& a, const Quaternion& q) {
  QuatMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * q;
  return out;
}

QuatMatrix transpose(const QuatMatrix& a) {
  QuatMatrix out(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

QuatMatrix conj_transpose(const QuatMatrix& a) {
  QuatMatrix out(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(j, i) = conj(a(i, j));
  return out;
}

QuatMatrix phi_transpose(const Involution& phi, const QuatMatrix& a) {
  QuatMatrix out(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(j, i) = phi(a(i, j));
  return out;
}

double fro_norm(const QuatMatrix& a) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) s += norm_sq(a(i, j));
  return std::sqrt(s);
}

QuatMatrix hstack(const std::vector<QuatMatrix>& parts) {
  if (parts.empty()) throw ShapeError("hstack: no parts");
  const Index r = parts.front().rows();
  Index c = 0;
  for (const auto& p : parts) {
    if (p.rows() != r) throw ShapeError("hstack: row count mismatch");
    c += p.cols();
  }
  QuatMatrix out(r, c);
  Index off = 0;
  for (const auto& p : parts) {
    for (Index i = 0; i < p.rows(); ++i)
      for (Index j = 0; j < p.cols(); ++j) out(i, off + j) = p(i, j);
    off += p.cols();
  }
  return out;
}

QuatMatrix vstack(const std::vector<QuatMatrix>& parts) {
  if (parts.empty()) throw ShapeError("vstack: no parts");
  const Index c = parts.front().cols();
  Index r = 0;
  for (const auto& p : parts) {
    if (p.cols() != c) throw ShapeError("vstack: column count mismatch");
    r += p.rows();
  }
  QuatMatrix out(r, c);
  Index off = 0;
  for (const auto& p : parts) {
    for (Index i = 0; i < p.rows(); ++i)
      for (Index j = 0; j < p.cols(); ++j) out(off + i, j) = p(i, j);
    off += p.rows();
  }
  return out;
}

QuatMatrix assemble_block(const BlockSpec& spec) {
  const Index nrows = static_cast<Index>(spec.cells.size());
  if (nrows == 0) throw ShapeError("assemble_block: empty grid");
  const Index ncols = static_cast<Index>(spec.cells.front().size());
  for (const auto& row : spec.cells) {
    if (static_cast<Index>(row.size()) != ncols) throw ShapeError("assemble_block: ragged grid");
  }
  if (ncols == 0) throw ShapeError("assemble_block: empty grid");

  std::vector<Index> heights(static_cast<std::size_t>(nrows), -1);
  std::vector<Index> widths(static_cast<std::size_t>(ncols), -1);
  for (Index i = 0; i < nrows; ++i) {
    for (Index j = 0; j < ncols; ++j) {
      const BlockCell& cell = spec.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (cell.kind != BlockCell::Kind::mat) continue;
      if (heights[static_cast<std::size_t>(i)] < 0) {
        heights[static_cast<std::size_t>(i)] = cell.mat.rows();
      } else if (heights[static_cast<std::size_t>(i)] != cell.mat.rows()) {
        throw ShapeError("assemble_block: inconsistent heights in grid row " + std::to_string(i));
      }
      if (widths[static_cast<std::size_t>(j)] < 0) {
        widths[static_cast<std::size_t>(j)] = cell.mat.cols();
      } else if (widths[static_cast<std::size_t>(j)] != cell.mat.cols()) {
        throw ShapeError("assemble_block: inconsistent widths in grid column " + std::to_string(j));
      }
    }
  }
  for (Index i = 0; i < nrows; ++i) {
    if (heights[static_cast<std::size_t>(i)] < 0) {
      throw ShapeError("assemble_block: cannot infer height of grid row " + std::to_string(i));
    }
  }
  for (Index j = 0; j < ncols; ++j) {
    if (widths[static_cast<std::size_t>(j)] < 0) {
      throw ShapeError("assemble_block: cannot infer width of grid column " + std::to_string(j));
    }
  }

  Index total_r = 0, total_c = 0;
  for (Index h : heights) total_r += h;
  for (Index w : widths) total_c += w;
  QuatMatrix out(total_r, total_c);
  Index roff = 0;
  for (Index i = 0; i < nrows; ++i) {
    Index coff = 0;
    for (Index j = 0; j < ncols; ++j) {
      const BlockCell& cell = spec.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (cell.kind == BlockCell::Kind::mat) {
        for (Index r = 0; r < cell.mat.rows(); ++r)
          for (Index cidx = 0; cidx < cell.mat.cols(); ++cidx)
            out(roff + r, coff + cidx) =
                cell.sign > 0 ? cell.mat(r, cidx) : -cell.mat(r, cidx);
      }
      coff += widths[static_cast<std::size_t>(j)];
    }
    roff += heights[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace qsylv
