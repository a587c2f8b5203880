#include "qsylv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qsylv {

namespace {

double comp(const Quaternion& q, Index t) {
  switch (t) {
    case 0: return q.w;
    case 1: return q.x;
    case 2: return q.y;
    case 3: return q.z;
  }
  return 0.0;
}

Quaternion unit(Index t) {
  Quaternion u;
  switch (t) {
    case 0: u.w = 1.0; break;
    case 1: u.x = 1.0; break;
    case 2: u.y = 1.0; break;
    default: u.z = 1.0; break;
  }
  return u;
}

void append_block(RealLinearSystem& out, UnknownBlock::Kind kind, Index index, Index rows,
                  Index cols, Index& col_off) {
  out.layout.push_back({kind, index, rows, cols, col_off});
  col_off += rows * cols * 4;
}

/// Adds the quaternion v at entry (row_entry) against real column col.
void add_entry(Eigen::MatrixXd& m, Index row_base, Index col, const Quaternion& v) {
  for (Index s = 0; s < 4; ++s) m(row_base + s, col) += comp(v, s);
}

Eigen::VectorXd real_singular_values(const Eigen::MatrixXd& a) {
  const lapack_int rows = static_cast<lapack_int>(a.rows());
  const lapack_int cols = static_cast<lapack_int>(a.cols());
  const lapack_int mn = std::min(rows, cols);
  if (mn == 0) return Eigen::VectorXd();
  Eigen::MatrixXd work = a;
  Eigen::VectorXd sv(mn);
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, work.data(), rows,
                                         sv.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw std::runtime_error("real SVD failed to converge (info " + std::to_string(info) + ")");
  }
  return sv;
}

Index real_rank(const Eigen::MatrixXd& a, double* tol_out) {
  const Eigen::VectorXd sv = real_singular_values(a);
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double tol =
      static_cast<double>(std::max(a.rows(), a.cols())) * smax * std::ldexp(1.0, -40);
  if (tol_out) *tol_out = tol;
  Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++r;
  }
  return r;
}

}  // namespace

RealLinearSystem realify(const SylvesterSystem& sys) {
  sys.validate();
  const Index k = sys.k();
  std::vector<Index> row_off(static_cast<std::size_t>(k + 1), 0);
  for (Index i = 0; i < k; ++i) {
    const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
    row_off[static_cast<std::size_t>(i + 1)] =
        row_off[static_cast<std::size_t>(i)] + 4 * eq.p() * eq.q();
  }

  RealLinearSystem out;
  Index col_off = 0;
  for (Index i = 0; i < k; ++i) {
    const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
    append_block(out, UnknownBlock::Kind::x, i, eq.a(), eq.q(), col_off);
  }
  for (Index i = 0; i < k; ++i) {
    const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
    append_block(out, UnknownBlock::Kind::y, i, eq.p(), eq.b(), col_off);
  }
  for (Index j = 0; j <= k; ++j) {
    const Index zr = j < k ? sys.eqs[static_cast<std::size_t>(j)].c()
                           : sys.eqs[static_cast<std::size_t>(k - 1)].f();
    const Index zc = j < k ? sys.eqs[static_cast<std::size_t>(j)].d()
                           : sys.eqs[static_cast<std::size_t>(k - 1)].g();
    append_block(out, UnknownBlock::Kind::z, j, zr, zc, col_off);
  }

  out.m = Eigen::MatrixXd::Zero(row_off[static_cast<std::size_t>(k)], col_off);
  out.b = Eigen::VectorXd::Zero(row_off[static_cast<std::size_t>(k)]);
  for (Index i = 0; i < k; ++i) {
    const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
    const Index base = row_off[static_cast<std::size_t>(i)];
    for (Index r = 0; r < eq.p(); ++r)
      for (Index c = 0; c < eq.q(); ++c)
        for (Index t = 0; t < 4; ++t) out.b(base + (r * eq.q() + c) * 4 + t) = comp(eq.E(r, c), t);
  }

  for (const auto& blk : out.layout) {
    const Index i = blk.index;
    switch (blk.kind) {
      case UnknownBlock::Kind::x: {
        const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
        const Index base = row_off[static_cast<std::size_t>(i)];
        for (Index r = 0; r < blk.rows; ++r)
          for (Index c = 0; c < blk.cols; ++c)
            for (Index t = 0; t < 4; ++t) {
              const Index col = blk.offset + (r * blk.cols + c) * 4 + t;
              const Quaternion u = unit(t);
              for (Index rho = 0; rho < eq.p(); ++rho) {
                add_entry(out.m, base + (rho * eq.q() + c) * 4, col, eq.A(rho, r) * u);
              }
            }
        break;
      }
      case UnknownBlock::Kind::y: {
        const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
        const Index base = row_off[static_cast<std::size_t>(i)];
        for (Index r = 0; r < blk.rows; ++r)
          for (Index c = 0; c < blk.cols; ++c)
            for (Index t = 0; t < 4; ++t) {
              const Index col = blk.offset + (r * blk.cols + c) * 4 + t;
              const Quaternion u = unit(t);
              for (Index g = 0; g < eq.q(); ++g) {
                add_entry(out.m, base + (r * eq.q() + g) * 4, col, u * eq.B(c, g));
              }
            }
        break;
      }
      case UnknownBlock::Kind::z: {
        for (Index r = 0; r < blk.rows; ++r)
          for (Index c = 0; c < blk.cols; ++c)
            for (Index t = 0; t < 4; ++t) {
              const Index col = blk.offset + (r * blk.cols + c) * 4 + t;
              const Quaternion u = unit(t);
              if (i < k) {
                const auto& eq = sys.eqs[static_cast<std::size_t>(i)];
                const Index base = row_off[static_cast<std::size_t>(i)];
                for (Index rho = 0; rho < eq.p(); ++rho) {
                  const Quaternion cu = eq.C(rho, r) * u;
                  for (Index g = 0; g < eq.q(); ++g) {
                    add_entry(out.m, base + (rho * eq.q() + g) * 4, col, cu * eq.D(c, g));
                  }
                }
              }
              if (i >= 1) {
                const auto& eq = sys.eqs[static_cast<std::size_t>(i - 1)];
                const Index base = row_off[static_cast<std::size_t>(i - 1)];
                for (Index rho = 0; rho < eq.p(); ++rho) {
                  const Quaternion fu = eq.F(rho, r) * u;
                  for (Index g = 0; g < eq.q(); ++g) {
                    add_entry(out.m, base + (rho * eq.q() + g) * 4, col, fu * eq.G(c, g));
                  }
                }
              }
            }
        break;
      }
    }
  }
  return out;
}

RealLinearSystem realify(const PhiSystem& ps) {
  ps.validate();
  const Index k = ps.k();
  std::vector<Index> row_off(static_cast<std::size_t>(k + 1), 0);
  for (Index i = 0; i < k; ++i) {
    const auto& eq = ps.eqs[static_cast<std::size_t>(i)];
    row_off[static_cast<std::size_t>(i + 1)] =
        row_off[static_cast<std::size_t>(i)] + 4 * eq.p() * eq.p();
  }
  std::vector<Index> zdim(static_cast<std::size_t>(k + 1), 0);
  for (Index j = 0; j <= k; ++j) {
    zdim[static_cast<std::size_t>(j)] = j < k ? ps.eqs[static_cast<std::size_t>(j)].c()
                                              : ps.eqs[static_cast<std::size_t>(k - 1)].f();
  }
  std::vector<Index> sym_off(static_cast<std::size_t>(k + 2), 0);
  sym_off[0] = row_off[static_cast<std::size_t>(k)];
  for (Index j = 0; j <= k; ++j) {
    sym_off[static_cast<std::size_t>(j + 1)] =
        sym_off[static_cast<std::size_t>(j)] +
        4 * zdim[static_cast<std::size_t>(j)] * zdim[static_cast<std::size_t>(j)];
  }

  RealLinearSystem out;
  Index col_off = 0;
  for (Index i = 0; i < k; ++i) {
    const auto& eq = ps.eqs[static_cast<std::size_t>(i)];
    append_block(out, UnknownBlock::Kind::x, i, eq.a(), eq.p(), col_off);
  }
  for (Index j = 0; j <= k; ++j) {
    append_block(out, UnknownBlock::Kind::z, j, zdim[static_cast<std::size_t>(j)],
                 zdim[static_cast<std::size_t>(j)], col_off);
  }

  const Index total_rows = sym_off[static_cast<std::size_t>(k + 1)];
  out.m = Eigen::MatrixXd::Zero(total_rows, col_off);
  out.b = Eigen::VectorXd::Zero(total_rows);
  for (Index i = 0; i < k; ++i) {
    const auto& eq = ps.eqs[static_cast<std::size_t>(i)];
    const Index base = row_off[static_cast<std::size_t>(i)];
    for (Index r = 0; r < eq.p(); ++r)
      for (Index c = 0; c < eq.p(); ++c)
        for (Index t = 0; t < 4; ++t) out.b(base + (r * eq.p() + c) * 4 + t) = comp(eq.E(r, c), t);
  }

  for (const auto& blk : out.layout) {
    const Index i = blk.index;
    if (blk.kind == UnknownBlock::Kind::x) {
      const auto& eq = ps.eqs[static_cast<std::size_t>(i)];
      const Index base = row_off[static_cast<std::size_t>(i)];
      const Index p = eq.p();
      for (Index r = 0; r < blk.rows; ++r)
        for (Index c = 0; c < blk.cols; ++c)
          for (Index t = 0; t < 4; ++t) {
            const Index col = blk.offset + (r * blk.cols + c) * 4 + t;
            const Quaternion u = unit(t);
            for (Index rho = 0; rho < p; ++rho) {
              const Quaternion v = eq.A(rho, r) * u;
              add_entry(out.m, base + (rho * p + c) * 4, col, v);
              add_entry(out.m, base + (c * p + rho) * 4, col, ps.phi(v));
            }
          }
      continue;
    }
    // Z_j: appears in equation j through C Z C_phi, in equation j - 1 through
    // F Z' F_phi, and in its own symmetry rows.
    const Index s = blk.rows;
    for (Index r = 0; r < s; ++r)
      for (Index c = 0; c < s; ++c)
        for (Index t = 0; t < 4; ++t) {
          const Index col = blk.offset + (r * s + c) * 4 + t;
          const Quaternion u = unit(t);
          if (i < k) {
            const auto& eq = ps.eqs[static_cast<std::size_t>(i)];
            const QuatMatrix cphi = phi_transpose(ps.phi, eq.C);
            const Index base = row_off[static_cast<std::size_t>(i)];
            const Index p = eq.p();
            for (Index rho = 0; rho < p; ++rho) {
              const Quaternion cu = eq.C(rho, r) * u;
              for (Index g = 0; g < p; ++g) {
                add_entry(out.m, base + (rho * p + g) * 4, col, cu * cphi(c, g));
              }
            }
          }
          if (i >= 1) {
            const auto& eq = ps.eqs[static_cast<std::size_t>(i - 1)];
            const QuatMatrix fphi = phi_transpose(ps.phi, eq.F);
            const Index base = row_off[static_cast<std::size_t>(i - 1)];
            const Index p = eq.p();
            for (Index rho = 0; rho < p; ++rho) {
              const Quaternion fu = eq.F(rho, r) * u;
              for (Index g = 0; g < p; ++g) {
                add_entry(out.m, base + (rho * p + g) * 4, col, fu * fphi(c, g));
              }
            }
          }
          const Index sbase = sym_off[static_cast<std::size_t>(i)];
          add_entry(out.m, sbase + (r * s + c) * 4, col, u);
          add_entry(out.m, sbase + (c * s + r) * 4, col, -1.0 * ps.phi(u));
        }
  }
  return out;
}

OracleVerdict oracle_consistent(const RealLinearSystem& rls) {
  OracleVerdict out;
  Eigen::MatrixXd mb(rls.m.rows(), rls.m.cols() + 1);
  mb << rls.m, rls.b;
  out.rank_m = real_rank(rls.m, &out.tol_m);
  out.rank_mb = real_rank(mb, &out.tol_mb);
  out.consistent = out.rank_m == out.rank_mb;
  return out;
}

OracleSolve oracle_solve(const RealLinearSystem& rls) {
  OracleSolve out;
  const lapack_int rows = static_cast<lapack_int>(rls.m.rows());
  const lapack_int cols = static_cast<lapack_int>(rls.m.cols());
  if (cols == 0) {
    out.x = Eigen::VectorXd();
    out.residual = rls.b.norm();
    return out;
  }
  if (rows == 0) {
    out.x = Eigen::VectorXd::Zero(cols);
    out.residual = 0.0;
    return out;
  }
  Eigen::MatrixXd work = rls.m;
  const lapack_int ldb = std::max(rows, cols);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ldb);
  rhs.head(rows) = rls.b;
  Eigen::VectorXd sv(std::min(rows, cols));
  const double rcond = static_cast<double>(std::max(rows, cols)) * std::ldexp(1.0, -40);
  lapack_int rank_out = 0;
  const lapack_int info =
      LAPACKE_dgelsd(LAPACK_COL_MAJOR, rows, cols, 1, work.data(), rows, rhs.data(), ldb,
                     sv.data(), rcond, &rank_out);
  if (info != 0) {
    throw std::runtime_error("least-squares solve failed (info " + std::to_string(info) + ")");
  }
  out.x = rhs.head(cols);
  out.residual = (rls.m * out.x - rls.b).norm();
  return out;
}

Eigen::MatrixXd left_nullspace(const Eigen::MatrixXd& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  if (cols == 0) return Eigen::MatrixXd::Identity(rows, rows);
  Eigen::MatrixXd work = m;
  const lapack_int mn = std::min(rows, cols);
  Eigen::VectorXd sv(mn);
  Eigen::MatrixXd u(rows, rows);
  Eigen::MatrixXd vt(cols, cols);
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', rows, cols, work.data(), rows,
                                         sv.data(), u.data(), rows, vt.data(), cols);
  if (info != 0) {
    throw std::runtime_error("real SVD failed to converge (info " + std::to_string(info) + ")");
  }
  const double smax = sv(0);
  const double tol = static_cast<double>(std::max(rows, cols)) * smax * std::ldexp(1.0, -40);
  Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++r;
  }
  return u.rightCols(rows - r);
}

namespace {

QuatMatrix read_block(const UnknownBlock& blk, const Eigen::VectorXd& x) {
  QuatMatrix out(blk.rows, blk.cols);
  for (Index r = 0; r < blk.rows; ++r)
    for (Index c = 0; c < blk.cols; ++c) {
      const Index off = blk.offset + (r * blk.cols + c) * 4;
      out(r, c) = Quaternion(x(off), x(off + 1), x(off + 2), x(off + 3));
    }
  return out;
}

}  // namespace

SystemSolution unpack_solution(const SylvesterSystem& sys, const RealLinearSystem& rls,
                               const Eigen::VectorXd& x) {
  if (x.size() != rls.m.cols()) throw ShapeError("solution vector length mismatch");
  SystemSolution sol;
  sol.X.resize(static_cast<std::size_t>(sys.k()));
  sol.Y.resize(static_cast<std::size_t>(sys.k()));
  sol.Z.resize(static_cast<std::size_t>(sys.k() + 1));
  for (const auto& blk : rls.layout) {
    switch (blk.kind) {
      case UnknownBlock::Kind::x: sol.X[static_cast<std::size_t>(blk.index)] = read_block(blk, x); break;
      case UnknownBlock::Kind::y: sol.Y[static_cast<std::size_t>(blk.index)] = read_block(blk, x); break;
      case UnknownBlock::Kind::z: sol.Z[static_cast<std::size_t>(blk.index)] = read_block(blk, x); break;
    }
  }
  sol.residuals = residuals(sys, sol);
  return sol;
}

PhiSolution unpack_phi_solution(const PhiSystem& ps, const RealLinearSystem& rls,
                                const Eigen::VectorXd& x) {
  if (x.size() != rls.m.cols()) throw ShapeError("solution vector length mismatch");
  PhiSolution sol;
  sol.X.resize(static_cast<std::size_t>(ps.k()));
  sol.Z.resize(static_cast<std::size_t>(ps.k() + 1));
  for (const auto& blk : rls.layout) {
    if (blk.kind == UnknownBlock::Kind::x) {
      sol.X[static_cast<std::size_t>(blk.index)] = read_block(blk, x);
    } else {
      sol.Z[static_cast<std::size_t>(blk.index)] = read_block(blk, x);
    }
  }
  sol.residuals = phi_residuals(ps, sol);
  return sol;
}

}  // namespace qsylv
