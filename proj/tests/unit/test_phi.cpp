#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "qsylv/phi.hpp"
#include "qsylv/rng.hpp"

using namespace qsylv;

namespace {
const Quaternion one{1, 0, 0, 0};
const Quaternion qk{0, 0, 0, 1};

bool near(const QuatMatrix& a, const QuatMatrix& b, double tol = 1e-9) {
  return a.rows() == b.rows() && a.cols() == b.cols() && fro_norm(a - b) <= tol;
}

Index draw_dim(Rng& rng) { return static_cast<Index>(rng.uniform_index(1, 3)); }

QuatMatrix symmetrize(const Involution& phi, const QuatMatrix& raw) {
  return 0.5 * (raw + phi_transpose(phi, raw));
}

PhiSystem plant_phi_chain(Rng& rng, Index k, const Involution& phi) {
  std::vector<Index> s(static_cast<std::size_t>(k) + 1);
  for (auto& v : s) v = draw_dim(rng);
  std::vector<QuatMatrix> z(s.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = symmetrize(phi, random_matrix(rng, s[j], s[j]));
  }
  PhiSystem ps;
  ps.phi = phi;
  for (Index i = 0; i < k; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    const Index p = draw_dim(rng), a = draw_dim(rng);
    PhiEquation eq;
    eq.A = random_matrix(rng, p, a);
    eq.C = random_matrix(rng, p, s[idx]);
    eq.F = random_matrix(rng, p, s[idx + 1]);
    const QuatMatrix x = random_matrix(rng, a, p);
    const QuatMatrix ax = eq.A * x;
    eq.E = ax + phi_transpose(phi, ax) + eq.C * z[idx] * phi_transpose(phi, eq.C) +
           eq.F * z[idx + 1] * phi_transpose(phi, eq.F);
    ps.eqs.push_back(eq);
  }
  return ps;
}
}  // namespace

TEST_CASE("hermitian defect") {
  const Involution phi;
  CHECK(phi_hermitian_check(phi, QuatMatrix::identity(3)).pass);
  CHECK(phi_hermitian_check(phi, QuatMatrix::identity(3)).defect == 0.0);

  const QuatMatrix flipped = QuatMatrix::from_rows({{qk}});
  const PhiHermitianCheck bad = phi_hermitian_check(phi, flipped);
  CHECK_FALSE(bad.pass);
  CHECK(bad.defect == doctest::Approx(2.0));

  CHECK_THROWS_AS(phi_hermitian_check(phi, QuatMatrix(2, 3)), NonSquare);

  Rng rng(61);
  const QuatMatrix sym = symmetrize(phi, random_matrix(rng, 3, 3));
  CHECK(phi_hermitian_check(phi, sym).pass);
}

TEST_CASE("system validation") {
  Rng rng(62);
  const Involution phi = Involution::from_axis(1, 1, 1);
  PhiSystem ps = plant_phi_chain(rng, 2, phi);
  ps.validate();

  PhiSystem rect = ps;
  rect.eqs[0].E = QuatMatrix(rect.eqs[0].p(), rect.eqs[0].p() + 1);
  CHECK_THROWS_AS(rect.validate(), NonSquare);

  PhiSystem skew = ps;
  skew.eqs[0].E(0, 0) = skew.eqs[0].E(0, 0) + qk;
  CHECK_THROWS_AS(skew.validate(), Error);

  PhiSystem mismatched = ps;
  mismatched.eqs[0].A = QuatMatrix(mismatched.eqs[0].p() + 1, 2);
  CHECK_THROWS_AS(mismatched.validate(), ShapeError);

  PhiSystem broken_chain = ps;
  broken_chain.eqs[1].C = QuatMatrix(broken_chain.eqs[1].p(), broken_chain.eqs[0].f() + 1);
  CHECK_THROWS_AS(broken_chain.validate(), ShapeError);

  CHECK_THROWS_AS(PhiSystem{}.validate(), Error);
}

TEST_CASE("substitution into the general chain") {
  Rng rng(63);
  const Involution phi = Involution::from_axis(0, 1, 2);
  const PhiSystem ps = plant_phi_chain(rng, 2, phi);
  const SylvesterSystem sys = to_general_system(ps);
  sys.validate();
  REQUIRE(sys.k() == 2);
  for (Index i = 0; i < 2; ++i) {
    const auto& g = sys.eqs[static_cast<std::size_t>(i)];
    const auto& s = ps.eqs[static_cast<std::size_t>(i)];
    CHECK(g.A == s.A);
    CHECK(g.E == s.E);
    CHECK(near(g.B, phi_transpose(phi, s.A), 1e-15));
    CHECK(near(g.D, phi_transpose(phi, s.C), 1e-15));
    CHECK(near(g.G, phi_transpose(phi, s.F), 1e-15));
  }
}

TEST_CASE("involution transport identities") {
  Rng rng(64);
  const Involution phi = Involution::from_axis(2, -1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const QuatMatrix a = trial % 2 == 0 ? random_matrix(rng, 3, 4)
                                        : random_rank_deficient(rng, 3, 4, 2);
    const QuatMatrix b = random_matrix(rng, 4, 2);

    CHECK(near(phi_transpose(phi, a * b), phi_transpose(phi, b) * phi_transpose(phi, a), 1e-12));
    CHECK(near(phi_transpose(phi, phi_transpose(phi, a)), a, 1e-13));
    CHECK(rank(a).rank == rank(phi_transpose(phi, a)).rank);
    CHECK(near(pinv(phi_transpose(phi, a)), phi_transpose(phi, pinv(a)),
               1e-9 * (1.0 + fro_norm(pinv(a)))));

    const Projectors pr = projectors(a);
    const Projectors prt = projectors(phi_transpose(phi, a));
    CHECK(near(phi_transpose(phi, pr.l), prt.r, 1e-9));
    CHECK(near(phi_transpose(phi, pr.r), prt.l, 1e-9));
  }
}

TEST_CASE("solve planted structured chains") {
  Rng rng(65);
  const Involution axes[] = {Involution(), Involution::from_axis(1, 1, 1),
                             Involution::from_axis(-1, 2, 0)};
  for (const Involution& phi : axes) {
    for (Index k = 1; k <= 3; ++k) {
      const PhiSystem ps = plant_phi_chain(rng, k, phi);
      const PhiSolution sol = solve_phi_system(ps);
      REQUIRE(sol.X.size() == static_cast<std::size_t>(k));
      REQUIRE(sol.Z.size() == static_cast<std::size_t>(k) + 1);

      const std::vector<double> res = phi_residuals(ps, sol);
      for (Index i = 0; i < k; ++i) {
        const double scale = 1.0 + fro_norm(ps.eqs[static_cast<std::size_t>(i)].E);
        CHECK(res[static_cast<std::size_t>(i)] <= 1e-8 * scale);
      }
      for (const QuatMatrix& z : sol.Z) {
        CHECK(phi_hermitian_check(ps.phi, z).pass);
      }
      CHECK(check_phi_system(ps).consistent);
    }
  }
}

TEST_CASE("structured condition families") {
  Rng rng(66);
  const PhiSystem ps = plant_phi_chain(rng, 2, Involution());
  const ConsistencyReport rep = check_phi_system(ps);
  // EQ2a and EQ3a per equation, EQ4 and EQ5 per window.
  CHECK(rep.conditions.size() == 2 * 2 + 2 * 3);
  for (const RankCondition& c : rep.conditions) {
    CHECK((c.family == ConditionFamily::eq2a || c.family == ConditionFamily::eq3a ||
           c.family == ConditionFamily::eq4 || c.family == ConditionFamily::eq5));
  }

  const ConsistencyReport strict = check_phi_system(ps, std::nullopt, true);
  CHECK(strict.conditions.size() == 2 * 2 + 4 * 3);
  CHECK(strict.consistent);
}

TEST_CASE("structured check agrees with the general check") {
  Rng rng(67);
  const Involution phi = Involution::from_axis(3, 0, 4);
  for (Index k = 1; k <= 2; ++k) {
    const PhiSystem ps = plant_phi_chain(rng, k, phi);
    const bool structured = check_phi_system(ps).consistent;
    const bool general = check_system(to_general_system(ps)).consistent;
    CHECK(structured == general);
  }
}

TEST_CASE("unreachable right side raises") {
  PhiEquation eq;
  eq.A = QuatMatrix(2, 1);
  eq.C = QuatMatrix(2, 1);
  eq.F = QuatMatrix(2, 1);
  eq.E = QuatMatrix::identity(2);
  PhiSystem ps;
  ps.eqs = {eq};
  ps.validate();

  CHECK_FALSE(check_phi_system(ps).consistent);
  try {
    solve_phi_system(ps);
    FAIL("expected InconsistentSystem");
  } catch (const InconsistentSystem& e) {
    CHECK_FALSE(e.report.consistent);
  }
}

TEST_CASE("residual evaluation validates shapes") {
  Rng rng(68);
  const PhiSystem ps = plant_phi_chain(rng, 2, Involution());
  const PhiSolution sol = solve_phi_system(ps);
  PhiSolution short_sol = sol;
  short_sol.Z.pop_back();
  CHECK_THROWS_AS(phi_residuals(ps, short_sol), ShapeError);
  PhiSolution wrong = sol;
  wrong.X[0] = QuatMatrix(wrong.X[0].rows() + 1, wrong.X[0].cols());
  CHECK_THROWS_AS(phi_residuals(ps, wrong), ShapeError);
}
