#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "qsylv/io.hpp"
#include "qsylv/rng.hpp"

using namespace qsylv;

namespace {
const Quaternion one{1, 0, 0, 0};
const Quaternion qi{0, 1, 0, 0};

SylvesterSystem small_system() {
  const QuatMatrix zero(1, 1);
  const QuatMatrix unit = QuatMatrix::from_rows({{one}});
  FourTermEquation eq1;
  eq1.A = zero, eq1.B = zero, eq1.C = zero, eq1.D = zero;
  eq1.F = unit, eq1.G = unit;
  eq1.E = unit;
  FourTermEquation eq2;
  eq2.A = zero, eq2.B = zero, eq2.C = unit, eq2.D = unit;
  eq2.F = zero, eq2.G = zero;
  eq2.E = QuatMatrix::from_rows({{qi}});
  SylvesterSystem sys;
  sys.eqs = {eq1, eq2};
  return sys;
}
}  // namespace

TEST_CASE("matrix golden form") {
  const std::string text = write_matrix(QuatMatrix::from_rows({{qi}}));
  const std::string golden = R"({
  "cols": 1,
  "data": [
    [
      [
        0.0,
        1.0,
        0.0,
        0.0
      ]
    ]
  ],
  "rows": 1
}
)";
  CHECK(text == golden);
}

TEST_CASE("matrix round trip is exact") {
  Rng rng(81);
  const QuatMatrix m = random_matrix(rng, 3, 2);
  const std::string text = write_matrix(m);
  CHECK(parse_matrix(text) == m);
  CHECK(write_matrix(parse_matrix(text)) == text);
  CHECK(text.back() == '\n');

  const QuatMatrix empty(0, 2);
  CHECK(parse_matrix(write_matrix(empty)) == empty);
}

TEST_CASE("matrix parse errors") {
  CHECK_THROWS_AS(parse_matrix("not json"), ParseError);
  CHECK_THROWS_AS(parse_matrix("[1, 2]"), ParseError);
  CHECK_THROWS_AS(parse_matrix(R"({"rows": 1, "cols": 1})"), ParseError);
  CHECK_THROWS_AS(parse_matrix(R"({"rows": -1, "cols": 1, "data": []})"), ParseError);
  CHECK_THROWS_AS(parse_matrix(R"({"rows": 1, "cols": 1, "data": []})"), ParseError);
  CHECK_THROWS_AS(
      parse_matrix(R"({"rows": 1, "cols": 1, "data": [[[0.0, 1.0, 0.0]]]})"), ParseError);
  CHECK_THROWS_AS(
      parse_matrix(R"({"rows": 1, "cols": 2, "data": [[[0, 0, 0, 0]]]})"), ParseError);

  try {
    parse_matrix(R"({"rows": 1, "cols": 2, "data": [[[0, 0, 0, 0]]]})");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("entries") != std::string::npos);
  }
}

TEST_CASE("system round trip and validation on parse") {
  const SylvesterSystem sys = small_system();
  const std::string text = write_system(sys);
  const SylvesterSystem back = parse_system(text);
  REQUIRE(back.k() == 2);
  CHECK(back.eqs[0].F == sys.eqs[0].F);
  CHECK(back.eqs[1].E == sys.eqs[1].E);
  CHECK(write_system(back) == text);

  CHECK_THROWS_AS(parse_system(R"({"k": 2, "equations": []})"), ParseError);

  // A shape-invalid system must be rejected at parse time.
  SylvesterSystem broken = sys;
  broken.eqs[1].C = QuatMatrix(1, 2);
  CHECK_THROWS_AS(parse_system(write_system(broken)), Error);
}

TEST_CASE("structured system round trip") {
  PhiEquation eq;
  eq.A = QuatMatrix(1, 1);
  eq.C = QuatMatrix(1, 1);
  eq.F = QuatMatrix(1, 1);
  eq.E = QuatMatrix::identity(1);
  PhiSystem ps;
  ps.phi = Involution::from_axis(0, 1, 0);
  ps.eqs = {eq};

  const std::string text = write_phi_system(ps);
  const PhiSystem back = parse_phi_system(text);
  CHECK(back.phi.axis() == ps.phi.axis());
  REQUIRE(back.k() == 1);
  CHECK(back.eqs[0].E == eq.E);
  CHECK(write_phi_system(back) == text);

  CHECK_THROWS_AS(
      parse_phi_system(R"({"axis": [0, 0], "k": 0, "equations": []})"), ParseError);
}

TEST_CASE("instance dispatch") {
  const ParsedInstance general = parse_instance(write_system(small_system()));
  CHECK(general.general.has_value());
  CHECK_FALSE(general.structured.has_value());

  PhiEquation eq;
  eq.A = QuatMatrix(1, 1), eq.C = QuatMatrix(1, 1), eq.F = QuatMatrix(1, 1);
  eq.E = QuatMatrix::identity(1);
  PhiSystem ps;
  ps.eqs = {eq};
  const ParsedInstance structured = parse_instance(write_phi_system(ps));
  CHECK(structured.structured.has_value());
  CHECK_FALSE(structured.general.has_value());
}

TEST_CASE("solution dispatch and round trip") {
  SystemSolution sol;
  sol.X = {QuatMatrix::identity(1)};
  sol.Y = {QuatMatrix(1, 1)};
  sol.Z = {QuatMatrix(1, 1), QuatMatrix::from_rows({{qi}})};
  sol.residuals = {0.0};
  const std::string text = write_solution(sol);
  const ParsedSolution back = parse_solution(text);
  REQUIRE(back.general.has_value());
  CHECK(back.general->Z[1] == sol.Z[1]);
  CHECK(back.general->residuals == sol.residuals);

  PhiSolution psol;
  psol.X = {QuatMatrix(1, 1)};
  psol.Z = {QuatMatrix(1, 1), QuatMatrix(1, 1)};
  psol.residuals = {0.0};
  const ParsedSolution sback = parse_solution(write_phi_solution(psol));
  REQUIRE(sback.structured.has_value());
  CHECK_FALSE(sback.general.has_value());
}

TEST_CASE("report and summary writers") {
  RankCondition cond;
  cond.family = ConditionFamily::eq4;
  cond.m = 1;
  cond.n = 2;
  cond.lhs_rank = 3;
  cond.rhs_rank = 2;
  cond.pass = false;
  ConsistencyReport rep;
  rep.conditions = {cond};
  rep.consistent = false;

  const std::string text = write_report(rep);
  CHECK(text.find("\"EQ4\"") != std::string::npos);
  CHECK(text.find("\"consistent\": false") != std::string::npos);
  CHECK(text.back() == '\n');

  OracleAnnotation ann;
  ann.consistent = true;
  ann.residual = 0.5;
  const std::string with_oracle = write_report(rep, &ann);
  CHECK(with_oracle.find("\"oracle\"") != std::string::npos);

  VerifySummary v;
  v.ok = true;
  v.tol = 1e-8;
  v.residuals = {0.0};
  const std::string vtext = write_verify(v);
  CHECK(vtext.find("\"ok\": true") != std::string::npos);

  const std::string rtext = write_rank(rank(QuatMatrix::identity(2)));
  CHECK(rtext.find("\"rank\": 2") != std::string::npos);
  CHECK(rtext.find("singular_values") != std::string::npos);
}

TEST_CASE("writing is deterministic") {
  Rng a(82), b(82);
  const QuatMatrix ma = random_matrix(a, 4, 3);
  const QuatMatrix mb = random_matrix(b, 4, 3);
  CHECK(write_matrix(ma) == write_matrix(mb));
}
