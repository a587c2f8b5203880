#include "qsylv/generate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qsylv/oracle.hpp"

namespace qsylv {

namespace {

QuatMatrix draw_coefficient(Rng& rng, Index rows, Index cols, const PlantOptions& opts) {
  const Index full = std::min(rows, cols);
  if (opts.forced_rank) {
    const Index r = std::min(full, std::max<Index>(*opts.forced_rank, 0));
    if (r >= full) return random_matrix(rng, rows, cols);
    return random_rank_deficient(rng, rows, cols, r);
  }
  if (opts.deficient_fraction > 0.0) {
    const bool deficient = rng.uniform() < opts.deficient_fraction;
    if (deficient && full >= 2) {
      const Index r = rng.uniform_index(1, full - 1);
      return random_rank_deficient(rng, rows, cols, r);
    }
  }
  return random_matrix(rng, rows, cols);
}

Index draw_dim(Rng& rng, const PlantOptions& opts) {
  return rng.uniform_index(opts.min_dim, opts.max_dim);
}

void check_plant_options(Index k, const PlantOptions& opts) {
  if (k < 1) throw Error("k must be at least 1");
  if (opts.min_dim < 1 || opts.max_dim < opts.min_dim) {
    throw Error("dimension range must satisfy 1 <= min_dim <= max_dim");
  }
}

QuatMatrix unvec(const Eigen::VectorXd& v, Index off, Index rows, Index cols) {
  QuatMatrix out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const Index base = off + (r * cols + c) * 4;
      out(r, c) = Quaternion(v(base), v(base + 1), v(base + 2), v(base + 3));
    }
  return out;
}

constexpr int kMaxAttempts = 100;

}  // namespace

std::pair<SylvesterSystem, SystemSolution> plant_system(Rng& rng, Index k,
                                                        const PlantOptions& opts) {
  check_plant_options(k, opts);
  std::vector<Index> p(static_cast<std::size_t>(k)), q(static_cast<std::size_t>(k)),
      a(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    p[static_cast<std::size_t>(i)] = draw_dim(rng, opts);
    q[static_cast<std::size_t>(i)] = draw_dim(rng, opts);
    a[static_cast<std::size_t>(i)] = draw_dim(rng, opts);
    b[static_cast<std::size_t>(i)] = draw_dim(rng, opts);
  }
  std::vector<Index> zr(static_cast<std::size_t>(k + 1)), zc(static_cast<std::size_t>(k + 1));
  for (Index j = 0; j <= k; ++j) {
    zr[static_cast<std::size_t>(j)] = draw_dim(rng, opts);
    zc[static_cast<std::size_t>(j)] = draw_dim(rng, opts);
  }

  SylvesterSystem sys;
  sys.eqs.resize(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    auto& eq = sys.eqs[static_cast<std::size_t>(i)];
    const auto si = static_cast<std::size_t>(i);
    eq.A = draw_coefficient(rng, p[si], a[si], opts);
    eq.B = draw_coefficient(rng, b[si], q[si], opts);
    eq.C = draw_coefficient(rng, p[si], zr[si], opts);
    eq.D = draw_coefficient(rng, zc[si], q[si], opts);
    eq.F = draw_coefficient(rng, p[si], zr[si + 1], opts);
    eq.G = draw_coefficient(rng, zc[si + 1], q[si], opts);
  }

  SystemSolution sol;
  for (Index i = 0; i < k; ++i) {
    const auto si = static_cast<std::size_t>(i);
    sol.X.push_back(random_matrix(rng, a[si], q[si]));
    sol.Y.push_back(random_matrix(rng, p[si], b[si]));
  }
  for (Index j = 0; j <= k; ++j) {
    sol.Z.push_back(random_matrix(rng, zr[static_cast<std::size_t>(j)],
                                  zc[static_cast<std::size_t>(j)]));
  }
  for (Index i = 0; i < k; ++i) {
    const auto si = static_cast<std::size_t>(i);
    auto& eq = sys.eqs[si];
    eq.E = eq.A * sol.X[si] + sol.Y[si] * eq.B + eq.C * sol.Z[si] * eq.D +
           eq.F * sol.Z[si + 1] * eq.G;
  }
  sol.residuals = residuals(sys, sol);
  return {std::move(sys), std::move(sol)};
}

std::pair<PhiSystem, PhiSolution> plant_phi_system(Rng& rng, Index k, const Involution& phi,
                                                   const PlantOptions& opts) {
  check_plant_options(k, opts);
  std::vector<Index> p(static_cast<std::size_t>(k)), a(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    p[static_cast<std::size_t>(i)] = draw_dim(rng, opts);
    a[static_cast<std::size_t>(i)] = draw_dim(rng, opts);
  }
  std::vector<Index> zdim(static_cast<std::size_t>(k + 1));
  for (Index j = 0; j <= k; ++j) zdim[static_cast<std::size_t>(j)] = draw_dim(rng, opts);

  PhiSystem ps;
  ps.phi = phi;
  ps.eqs.resize(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    auto& eq = ps.eqs[static_cast<std::size_t>(i)];
    const auto si = static_cast<std::size_t>(i);
    eq.A = draw_coefficient(rng, p[si], a[si], opts);
    eq.C = draw_coefficient(rng, p[si], zdim[si], opts);
    eq.F = draw_coefficient(rng, p[si], zdim[si + 1], opts);
  }

  PhiSolution sol;
  for (Index i = 0; i < k; ++i) {
    const auto si = static_cast<std::size_t>(i);
    sol.X.push_back(random_matrix(rng, a[si], p[si]));
  }
  for (Index j = 0; j <= k; ++j) {
    const Index s = zdim[static_cast<std::size_t>(j)];
    const QuatMatrix raw = random_matrix(rng, s, s);
    sol.Z.push_back(0.5 * (raw + phi_transpose(phi, raw)));
  }
  for (Index i = 0; i < k; ++i) {
    const auto si = static_cast<std::size_t>(i);
    auto& eq = ps.eqs[si];
    const QuatMatrix ax = eq.A * sol.X[si];
    eq.E = ax + phi_transpose(phi, ax) + eq.C * sol.Z[si] * phi_transpose(phi, eq.C) +
           eq.F * sol.Z[si + 1] * phi_transpose(phi, eq.F);
  }
  sol.residuals = phi_residuals(ps, sol);
  return {std::move(ps), std::move(sol)};
}

namespace {

/// Low-rank coefficients on dimensions >= 3 leave the reachable subspace of
/// the realified map strictly smaller than the target space, so a left-null
/// direction always exists; pushing E along one makes the system inconsistent
/// by an amount proportional to the data scale.
SylvesterSystem make_inconsistent(Rng& rng, const GenOptions& opts) {
  PlantOptions plant;
  plant.min_dim = std::max<Index>(opts.min_dim, 3);
  plant.max_dim = std::max<Index>(opts.max_dim, plant.min_dim);
  plant.forced_rank = 1;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    auto [sys, sol] = plant_system(rng, opts.k, plant);
    const RealLinearSystem rls = realify(sys);
    const Eigen::MatrixXd null_basis = left_nullspace(rls.m);
    if (null_basis.cols() == 0) continue;
    Eigen::VectorXd mix(null_basis.cols());
    for (Eigen::Index t = 0; t < mix.size(); ++t) mix(t) = rng.normal();
    Eigen::VectorXd dir = null_basis * mix;
    const double len = dir.norm();
    if (!(len > 1e-12)) continue;
    dir /= len;
    double scale = 1.0;
    for (const auto& eq : sys.eqs) scale = std::max(scale, 1.0 + fro_norm(eq.E));
    Index off = 0;
    for (auto& eq : sys.eqs) {
      eq.E = eq.E + scale * unvec(dir, off, eq.p(), eq.q());
      off += 4 * eq.p() * eq.q();
    }
    const OracleVerdict verdict = oracle_consistent(realify(sys));
    if (!verdict.consistent) return sys;
  }
  throw GenerationError("failed to certify an inconsistent instance");
}

PhiSystem make_inconsistent_phi(Rng& rng, const Involution& phi, const GenOptions& opts) {
  PlantOptions plant;
  plant.min_dim = std::max<Index>(opts.min_dim, 3);
  plant.max_dim = std::max<Index>(opts.max_dim, plant.min_dim);
  plant.forced_rank = 1;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    auto [ps, sol] = plant_phi_system(rng, opts.k, phi, plant);
    const Index j = rng.uniform_index(0, ps.k() - 1);
    auto& eq = ps.eqs[static_cast<std::size_t>(j)];
    const QuatMatrix raw = random_matrix(rng, eq.p(), eq.p());
    QuatMatrix pert = 0.5 * (raw + phi_transpose(phi, raw));
    const double len = fro_norm(pert);
    if (!(len > 1e-12)) continue;
    eq.E = eq.E + ((1.0 + fro_norm(eq.E)) / len) * pert;
    const OracleVerdict verdict = oracle_consistent(realify(ps));
    if (!verdict.consistent) return ps;
  }
  throw GenerationError("failed to certify an inconsistent phi-structured instance");
}

}  // namespace

GenResult generate(std::uint64_t seed, const GenOptions& opts) {
  if (opts.k < 1) throw Error("k must be at least 1");
  if (opts.min_dim < 1 || opts.max_dim < opts.min_dim) {
    throw Error("dimension range must satisfy 1 <= min_dim <= max_dim");
  }
  if (opts.deficient_fraction < 0.0 || opts.deficient_fraction > 1.0) {
    throw Error("deficient fraction must lie in [0, 1]");
  }
  Rng rng(seed);
  GenResult out;
  if (opts.phi_axis) {
    const Involution phi = Involution::from_axis(*opts.phi_axis);
    if (opts.inconsistent) {
      out.structured = make_inconsistent_phi(rng, phi, opts);
    } else {
      PlantOptions plant;
      plant.min_dim = opts.min_dim;
      plant.max_dim = opts.max_dim;
      plant.deficient_fraction = opts.deficient_fraction;
      out.structured = plant_phi_system(rng, opts.k, phi, plant).first;
    }
    return out;
  }
  if (opts.inconsistent) {
    out.general = make_inconsistent(rng, opts);
  } else {
    PlantOptions plant;
    plant.min_dim = opts.min_dim;
    plant.max_dim = opts.max_dim;
    plant.deficient_fraction = opts.deficient_fraction;
    out.general = plant_system(rng, opts.k, plant).first;
  }
  return out;
}

}  // namespace qsylv
