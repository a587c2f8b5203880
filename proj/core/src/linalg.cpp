#include "qsylv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/SVD>

namespace qsylv {

namespace {

constexpr double kMarginCap = 1e300;

/// Thin SVD of a complex matrix. LAPACK's divide and conquer driver is used
/// because the consistency checker evaluates thousands of these; Eigen's
/// Jacobi SVD is kept as a fallback for the rare nonconvergent case.
struct ComplexSvd {
  Eigen::VectorXd sv;   // min(m, n) singular values, descending
  Eigen::MatrixXcd u;   // m x min(m, n), only when vectors requested
  Eigen::MatrixXcd vh;  // min(m, n) x n, only when vectors requested
};

ComplexSvd complex_svd(const Eigen::MatrixXcd& a, bool vectors) {
  ComplexSvd out;
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int mn = std::min(m, n);
  out.sv = Eigen::VectorXd::Zero(mn);
  if (mn == 0) {
    if (vectors) {
      out.u = Eigen::MatrixXcd::Zero(m, 0);
      out.vh = Eigen::MatrixXcd::Zero(0, n);
    }
    return out;
  }
  Eigen::MatrixXcd work = a;
  lapack_int info = -1;
  if (vectors) {
    out.u.resize(m, mn);
    out.vh.resize(mn, n);
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.sv.data(),
                          out.u.data(), m, out.vh.data(), mn);
  } else {
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, out.sv.data(), nullptr, 1,
                          nullptr, 1);
  }
  if (info != 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        a, vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0);
    out.sv = svd.singularValues();
    if (vectors) {
      out.u = svd.matrixU();
      out.vh = svd.matrixV().adjoint();
    }
  }
  return out;
}

/// De-duplicates the paired singular values of an embedded matrix.
std::vector<double> dedup_pairs(const Eigen::VectorXd& sv) {
  std::vector<double> out(static_cast<std::size_t>(sv.size() / 2));
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = 0.5 * (sv(static_cast<Index>(2 * t)) + sv(static_cast<Index>(2 * t + 1)));
  }
  return out;
}

}  // namespace

ComplexMatrix complex_adjoint(const QuatMatrix& a) {
  const Index m = a.rows(), n = a.cols();
  ComplexMatrix out(2 * m, 2 * n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Quaternion& q = a(i, j);
      const std::complex<double> a1(q.w, q.x);
      const std::complex<double> a2(q.y, q.z);
      out(i, j) = a1;
      out(i, j + n) = a2;
      out(i + m, j) = -std::conj(a2);
      out(i + m, j + n) = std::conj(a1);
    }
  }
  return out;
}

QuatMatrix adjoint_inverse(const ComplexMatrix& c) {
  if (c.rows() % 2 != 0 || c.cols() % 2 != 0) {
    throw ShapeError("adjoint_inverse: dimensions must be even");
  }
  const Index m = c.rows() / 2, n = c.cols() / 2;
  QuatMatrix out(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      const std::complex<double> a1 = 0.5 * (c(i, j) + std::conj(c(i + m, j + n)));
      const std::complex<double> a2 = 0.5 * (c(i, j + n) - std::conj(c(i + m, j)));
      out(i, j) = Quaternion(a1.real(), a1.imag(), a2.real(), a2.imag());
    }
  }
  return out;
}

double default_rank_tol(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::ldexp(sigma_max, -40);
}

RankResult rank(const QuatMatrix& a, std::optional<double> tol) {
  RankResult out;
  if (a.empty()) {
    out.tol_used = tol.value_or(0.0);
    return out;
  }
  const ComplexSvd svd = complex_svd(complex_adjoint(a), false);
  out.singular_values = dedup_pairs(svd.sv);
  const double smax = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  out.tol_used = tol.value_or(default_rank_tol(a.rows(), a.cols(), smax));
  for (double s : out.singular_values) {
    if (s > out.tol_used) ++out.rank;
  }
  return out;
}

QuatMatrix pinv(const QuatMatrix& a, std::optional<double> tol) {
  const Index m = a.rows(), n = a.cols();
  if (a.empty()) return QuatMatrix(n, m);
  const ComplexSvd svd = complex_svd(complex_adjoint(a), true);
  const std::vector<double> dedup = dedup_pairs(svd.sv);
  const double smax = dedup.empty() ? 0.0 : dedup.front();
  const double cut = tol.value_or(default_rank_tol(m, n, smax));
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(svd.sv.size());
  for (std::size_t t = 0; t < dedup.size(); ++t) {
    if (dedup[t] > cut) {
      inv(static_cast<Index>(2 * t)) = 1.0 / svd.sv(static_cast<Index>(2 * t));
      inv(static_cast<Index>(2 * t + 1)) = 1.0 / svd.sv(static_cast<Index>(2 * t + 1));
    }
  }
  const ComplexMatrix p = svd.vh.adjoint() * inv.asDiagonal() * svd.u.adjoint();
  return adjoint_inverse(p);
}

Projectors projectors(const QuatMatrix& a, std::optional<double> tol) {
  const QuatMatrix p = pinv(a, tol);
  Projectors out;
  out.l = QuatMatrix::identity(a.cols()) - p * a;
  out.r = QuatMatrix::identity(a.rows()) - a * p;
  return out;
}

MarsagliaStyanRanks marsaglia_styan_ranks(const QuatMatrix& a, const QuatMatrix& b,
                                          const QuatMatrix& c, std::optional<double> tol) {
  if (b.rows() != a.rows()) throw ShapeError("marsaglia_styan_ranks: b must share rows with a");
  if (c.cols() != a.cols()) throw ShapeError("marsaglia_styan_ranks: c must share columns with a");
  const Projectors pa = projectors(a, tol);
  MarsagliaStyanRanks out;
  // Each identity is decided at one shared cutoff, the default cutoff of its
  // stacked matrix. A projection like R_A b can vanish up to round off, and
  // judging it against its own noise-level scale would inflate its rank.
  const RankResult ab = rank(hstack({a, b}), tol);
  const double tol_cols = tol ? *tol : ab.tol_used;
  out.lhs_cols = rank(a, tol_cols).rank + rank(pa.r * b, tol_cols).rank;
  out.rhs_cols = ab.rank;
  const RankResult ac = rank(vstack({a, c}), tol);
  const double tol_rows = tol ? *tol : ac.tol_used;
  out.lhs_rows = rank(a, tol_rows).rank + rank(c * pa.l, tol_rows).rank;
  out.rhs_rows = ac.rank;
  return out;
}

double rank_margin(const RankResult& r) {
  double above = std::numeric_limits<double>::quiet_NaN();
  double below = 0.0;
  for (double s : r.singular_values) {
    if (s > r.tol_used) {
      above = s;  // descending order, the last one above wins
    } else {
      below = std::max(below, s);
    }
  }
  double margin = kMarginCap;
  if (!std::isnan(above) && r.tol_used > 0.0) {
    margin = std::min(margin, above / r.tol_used);
  }
  if (below > 0.0) {
    margin = std::min(margin, r.tol_used / below);
  }
  return margin;
}

}  // namespace qsylv
