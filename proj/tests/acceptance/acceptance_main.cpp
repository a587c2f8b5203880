#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifdef QSYLV_CLI_EXE
#include <sys/wait.h>
#endif

#include "qsylv/generate.hpp"
#include "qsylv/io.hpp"
#include "qsylv/linalg.hpp"
#include "qsylv/oracle.hpp"
#include "qsylv/phi.hpp"
#include "qsylv/rng.hpp"
#include "qsylv/sylvester.hpp"

using namespace qsylv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// Criterion 1: Moore-Penrose axioms over 500 seeded matrices up to 8 x 8,
// one third drawn rank-deficient; relative residuals at most 1e-10.
Outcome pinv_axioms() {
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    QuatMatrix a;
    if (trial % 3 == 0) {
      const Index m = static_cast<Index>(rng.uniform_index(2, 8));
      const Index n = static_cast<Index>(rng.uniform_index(2, 8));
      const Index r = static_cast<Index>(rng.uniform_index(1, std::min(m, n) - 1));
      a = random_rank_deficient(rng, m, n, r);
    } else {
      const Index m = static_cast<Index>(rng.uniform_index(1, 8));
      const Index n = static_cast<Index>(rng.uniform_index(1, 8));
      a = random_matrix(rng, m, n);
    }
    const QuatMatrix g = pinv(a);
    const QuatMatrix ag = a * g;
    const QuatMatrix ga = g * a;
    worst = std::max(worst, fro_norm(ag * a - a) / (1.0 + fro_norm(a)));
    worst = std::max(worst, fro_norm(ga * g - g) / (1.0 + fro_norm(g)));
    worst = std::max(worst, fro_norm(conj_transpose(ag) - ag) / (1.0 + fro_norm(ag)));
    worst = std::max(worst, fro_norm(conj_transpose(ga) - ga) / (1.0 + fro_norm(ga)));
  }
  return {worst <= 1e-10, "max relative residual " + fmt(worst)};
}

// Criterion 2: the complex embedding multiplies and pairs singular values,
// 200 seeded trials; multiplicativity within 1e-12, pairing gap within
// 1e-10 of the largest singular value.
Outcome embedding_soundness() {
  Rng rng(1002);
  double worst_mult = 0.0, worst_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index m = static_cast<Index>(rng.uniform_index(1, 6));
    const Index inner = static_cast<Index>(rng.uniform_index(1, 6));
    const Index n = static_cast<Index>(rng.uniform_index(1, 6));
    const QuatMatrix a = random_matrix(rng, m, inner);
    const QuatMatrix b = random_matrix(rng, inner, n);
    const ComplexMatrix ca = complex_adjoint(a);
    const ComplexMatrix cb = complex_adjoint(b);
    const double scale = 1.0 + ca.norm() * cb.norm();
    worst_mult = std::max(worst_mult, (complex_adjoint(a * b) - ca * cb).norm() / scale);

    Eigen::JacobiSVD<ComplexMatrix> svd(ca);
    const Eigen::VectorXd s = svd.singularValues();
    if (s.size() > 0 && s(0) > 0.0) {
      for (Eigen::Index i = 0; i + 1 < s.size(); i += 2) {
        worst_gap = std::max(worst_gap, std::abs(s(i) - s(i + 1)) / s(0));
      }
    }
  }
  const bool pass = worst_mult <= 1e-12 && worst_gap <= 1e-10;
  return {pass, "max multiplicativity " + fmt(worst_mult) + ", max pairing gap " + fmt(worst_gap)};
}

// Criterion 3: both rank additivity identities hold as exact integer
// equalities on 200 seeded triples whose nonzero singular values clear the
// rank cutoff by a factor of 1e3.
Outcome rank_additivity() {
  Rng rng(1003);
  const auto well_separated = [](const QuatMatrix& m) {
    const RankResult r = rank(m);
    if (r.rank == 0) return true;
    return r.singular_values[static_cast<std::size_t>(r.rank) - 1] >= 1e3 * r.tol_used;
  };
  int done = 0, mismatches = 0, attempts = 0;
  while (done < 200 && attempts < 4000) {
    ++attempts;
    const Index m = static_cast<Index>(rng.uniform_index(1, 5));
    const Index n = static_cast<Index>(rng.uniform_index(1, 5));
    QuatMatrix a;
    if (done % 2 == 0 && std::min(m, n) >= 2) {
      a = random_rank_deficient(rng, m, n, static_cast<Index>(rng.uniform_index(1, std::min(m, n) - 1)));
    } else {
      a = random_matrix(rng, m, n);
    }
    const QuatMatrix b = random_matrix(rng, m, static_cast<Index>(rng.uniform_index(1, 4)));
    const QuatMatrix c = random_matrix(rng, static_cast<Index>(rng.uniform_index(1, 4)), n);
    if (!(well_separated(a) && well_separated(b) && well_separated(c))) continue;
    const MarsagliaStyanRanks ms = marsaglia_styan_ranks(a, b, c);
    if (ms.lhs_cols != ms.rhs_cols || ms.lhs_rows != ms.rhs_rows) ++mismatches;
    ++done;
  }
  const bool pass = done == 200 && mismatches == 0;
  return {pass, fmt(done) + " triples, " + fmt(mismatches) + " mismatches"};
}

// Criterion 4: on single equations the four projector conditions and the
// rank condition families return the same verdict, 200 planted consistent
// plus 200 certified inconsistent trials.
Outcome verdict_agreement() {
  int agree = 0;
  PlantOptions po;
  po.max_dim = 5;
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng(20000 + trial);
    const auto [sys, sol] = plant_system(rng, 1, po);
    const bool lemma = equation_consistent(equation_aux(sys.eqs[0])).pass;
    const bool families = check_system(sys).consistent;
    if (lemma && families) ++agree;
  }
  GenOptions go;
  go.k = 1;
  go.max_dim = 5;
  go.inconsistent = true;
  for (int trial = 0; trial < 200; ++trial) {
    const GenResult gen_res = generate(30000 + static_cast<std::uint64_t>(trial), go);
    const bool lemma = equation_consistent(equation_aux(gen_res.general->eqs[0])).pass;
    const bool families = check_system(*gen_res.general).consistent;
    if (!lemma && !families) ++agree;
  }
  return {agree == 400, fmt(agree) + " / 400 agreements"};
}

// Criterion 5: 50 planted chains per k in 1..4 with dimensions up to 5;
// every rank condition passes, solver residuals stay within
// 1e-8 (1 + |E_i|_F), consecutive equations agree on the shared Z, the
// realified oracle concurs, and the whole sweep finishes inside 60 seconds.
Outcome planted_soundness(std::vector<SylvesterSystem>& kept) {
  const auto start = std::chrono::steady_clock::now();
  int bad = 0;
  std::string first_bad;
  for (Index k = 1; k <= 4; ++k) {
    for (int trial = 0; trial < 50; ++trial) {
      Rng rng(40000 + 1000 * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(trial));
      PlantOptions po;
      po.max_dim = 5;
      const auto [sys, planted] = plant_system(rng, k, po);
      kept.push_back(sys);

      bool ok = check_system(sys).consistent;
      try {
        SolveStats stats;
        const SystemSolution sol = solve_system(sys, {}, &stats);
        for (Index i = 0; i < k; ++i) {
          const std::size_t s = static_cast<std::size_t>(i);
          ok = ok && sol.residuals[s] <= 1e-8 * (1.0 + fro_norm(sys.eqs[s].E));
        }
        for (std::size_t i = 0; i < stats.shared_z_gaps.size(); ++i) {
          ok = ok && stats.shared_z_gaps[i] <= 1e-8 * (1.0 + fro_norm(sol.Z[i + 1]));
        }
      } catch (const Error&) {
        ok = false;
      }
      ok = ok && oracle_consistent(realify(sys)).consistent;
      if (!ok) {
        ++bad;
        if (first_bad.empty()) first_bad = " first failure at k=" + fmt(k) + " trial " + fmt(trial);
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = bad == 0 && elapsed <= 60.0;
  return {pass, fmt(bad) + " failing systems," + first_bad + " sweep took " + fmt(elapsed) + " s"};
}

// Criterion 6: 200 oracle-certified inconsistent chains with k up to 3; the
// checker reports at least one failing condition and the solver refuses.
Outcome inconsistency_detected() {
  int undetected = 0, unsolved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    GenOptions go;
    go.k = 1 + trial % 3;
    go.max_dim = 4;
    go.inconsistent = true;
    const GenResult gen_res = generate(50000 + static_cast<std::uint64_t>(trial), go);
    const ConsistencyReport rep = check_system(*gen_res.general);
    bool found_failing = false;
    for (const RankCondition& c : rep.conditions) found_failing = found_failing || !c.pass;
    if (!found_failing || rep.consistent) ++undetected;
    try {
      solve_system(*gen_res.general);
      ++unsolved;
    } catch (const InconsistentSystem&) {
      // expected
    }
  }
  const bool pass = undetected == 0 && unsolved == 0;
  return {pass, fmt(undetected) + " undetected, " + fmt(unsolved) + " solver misses"};
}

// Criterion 7: the reduced chain of every planted system from criterion 5 is
// itself consistent under the full condition check.
Outcome reduction_consistency(const std::vector<SylvesterSystem>& kept) {
  int bad = 0, checked = 0;
  for (const SylvesterSystem& sys : kept) {
    if (sys.k() < 2) continue;
    ++checked;
    try {
      const Reduction red = reduce_system(sys);
      if (!check_system(red.hatted).consistent) ++bad;
    } catch (const Error&) {
      ++bad;
    }
  }
  return {bad == 0 && checked > 0, fmt(checked) + " reduced chains, " + fmt(bad) + " failing"};
}

// Criterion 8: structured layer. 100 planted phi-chains with k up to 3 over
// two distinct axes: solver residuals within 1e-8, phi-Hermitian defects of
// every Z within 1e-10, and the structured check agrees with the general
// check under substitution. The five transport identities of the involution
// are each verified on 100 random matrices.
Outcome structured_layer() {
  const Involution axis_a;
  const Involution axis_b = Involution::from_axis(1, 1, 1);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(60000 + static_cast<std::uint64_t>(trial));
    const Involution& phi = trial % 2 == 0 ? axis_a : axis_b;
    const Index k = 1 + trial % 3;
    PlantOptions po;
    po.max_dim = 4;
    const auto [ps, planted] = plant_phi_system(rng, k, phi, po);

    bool ok = true;
    try {
      const PhiSolution sol = solve_phi_system(ps);
      for (Index i = 0; i < k; ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        ok = ok && sol.residuals[s] <= 1e-8 * (1.0 + fro_norm(ps.eqs[s].E));
      }
      for (const QuatMatrix& z : sol.Z) {
        ok = ok && fro_norm(z - phi_transpose(phi, z)) <= 1e-10 * (1.0 + fro_norm(z));
      }
    } catch (const Error&) {
      ok = false;
    }
    const bool structured = check_phi_system(ps).consistent;
    const bool general = check_system(to_general_system(ps)).consistent;
    ok = ok && structured && structured == general;
    if (!ok) ++bad;
  }

  int prop_bad = 0;
  Rng prng(61000);
  for (int trial = 0; trial < 100; ++trial) {
    const Involution phi =
        Involution::from_axis(prng.normal(), prng.normal(), prng.normal() + 2.0);
    const Index m = static_cast<Index>(prng.uniform_index(1, 5));
    const Index n = static_cast<Index>(prng.uniform_index(1, 5));
    const QuatMatrix a = trial % 4 == 0 && std::min(m, n) >= 2
                             ? random_rank_deficient(prng, m, n, std::min(m, n) - 1)
                             : random_matrix(prng, m, n);
    const QuatMatrix b = random_matrix(prng, n, static_cast<Index>(prng.uniform_index(1, 5)));

    bool ok = true;
    const double ab_scale = 1.0 + fro_norm(a) * fro_norm(b);
    ok = ok && fro_norm(phi_transpose(phi, a * b) -
                        phi_transpose(phi, b) * phi_transpose(phi, a)) <= 1e-12 * ab_scale;
    ok = ok && fro_norm(phi_transpose(phi, phi_transpose(phi, a)) - a) <=
                   1e-12 * (1.0 + fro_norm(a));
    ok = ok && rank(a).rank == rank(phi_transpose(phi, a)).rank;
    const QuatMatrix ap = pinv(a);
    ok = ok && fro_norm(pinv(phi_transpose(phi, a)) - phi_transpose(phi, ap)) <=
                   1e-9 * (1.0 + fro_norm(ap));
    const Projectors pr = projectors(a);
    const Projectors prt = projectors(phi_transpose(phi, a));
    ok = ok && fro_norm(phi_transpose(phi, pr.l) - prt.r) <= 1e-9;
    ok = ok && fro_norm(phi_transpose(phi, pr.r) - prt.l) <= 1e-9;
    if (!ok) ++prop_bad;
  }

  const bool pass = bad == 0 && prop_bad == 0;
  return {pass, fmt(bad) + " failing chains, " + fmt(prop_bad) + " failing identity trials"};
}

#ifdef QSYLV_CLI_EXE
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Criterion 9: generation is byte deterministic through the command line
// tool and the documented exit codes hold: 0 consistent/ok, 1 negative
// verdict, 2 invalid input.
Outcome cli_contract() {
  namespace fs = std::filesystem;
  const fs::path dir = "acceptance_tmp";
  fs::create_directories(dir);
  const std::string exe = QSYLV_CLI_EXE;

  const auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + exe + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const auto at = [&](const char* name) { return (dir / name).string(); };

  bool ok = true;
  std::string why;
  const auto expect = [&](bool cond, const std::string& msg) {
    if (!cond && why.empty()) {
      ok = false;
      why = msg;
    }
  };

  expect(run("gen --seed 7 --k 2 --max-dim 3 -o " + at("g1.json")) == 0, "gen exit code");
  expect(run("gen --seed 7 --k 2 --max-dim 3 -o " + at("g2.json")) == 0, "gen exit code");
  const std::string g1 = slurp(at("g1.json"));
  expect(!g1.empty() && g1 == slurp(at("g2.json")), "gen not byte deterministic");

  expect(run("check " + at("g1.json") + " -o " + at("c1.json")) == 0, "check exit code");
  expect(run("check " + at("g1.json") + " -o " + at("c2.json")) == 0, "check exit code");
  expect(!slurp(at("c1.json")).empty() && slurp(at("c1.json")) == slurp(at("c2.json")),
         "check not byte deterministic");

  expect(run("solve " + at("g1.json") + " -o " + at("s1.json")) == 0, "solve exit code");
  expect(run("solve " + at("g1.json") + " -o " + at("s2.json")) == 0, "solve exit code");
  expect(!slurp(at("s1.json")).empty() && slurp(at("s1.json")) == slurp(at("s2.json")),
         "solve not byte deterministic");

  expect(run("verify " + at("g1.json") + " -s " + at("s1.json") + " -o " + at("v1.json")) == 0,
         "verify exit code");
  expect(run("verify " + at("g1.json") + " -s " + at("s1.json") + " -o " + at("v2.json")) == 0,
         "verify exit code");
  expect(slurp(at("v1.json")) == slurp(at("v2.json")), "verify not byte deterministic");

  expect(run("gen --seed 3 --k 2 --inconsistent -o " + at("bad.json")) == 0, "gen exit code");
  expect(run("check " + at("bad.json") + " -o " + at("cb.json")) == 1,
         "check of an inconsistent instance must exit 1");
  expect(run("solve " + at("bad.json") + " -o " + at("sb.json")) == 1,
         "solve of an inconsistent instance must exit 1");
  expect(slurp(at("sb.json")).find("\"consistent\": false") != std::string::npos,
         "failed solve must write the condition report");

  {
    std::ofstream garbage(dir / "garbage.json", std::ios::binary);
    garbage << "nonsense\n";
  }
  expect(run("check " + at("garbage.json")) == 2, "invalid input must exit 2");
  expect(run("gen --seed 1 --k 0 -o " + at("never.json")) == 2, "invalid options must exit 2");

  expect(run("gen --seed 5 --k 2 --phi-axis 1,1,1 -o " + at("p1.json")) == 0, "gen exit code");
  expect(run("gen --seed 5 --k 2 --phi-axis 1,1,1 -o " + at("p2.json")) == 0, "gen exit code");
  expect(!slurp(at("p1.json")).empty() && slurp(at("p1.json")) == slurp(at("p2.json")),
         "structured gen not byte deterministic");
  expect(run("solve " + at("p1.json") + " -o " + at("ps1.json")) == 0, "structured solve exit");
  expect(run("verify " + at("p1.json") + " -s " + at("ps1.json") + " -o " + at("pv.json")) == 0,
         "structured verify exit");

  return {ok, ok ? "exit codes and byte determinism hold" : why};
}
#else
Outcome cli_contract() { return {false, "tool target was not built"}; }
#endif

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const char* name, const Outcome& out, double secs) {
    std::printf("%s criterion %d: %s (%s; %.1f s)\n", out.pass ? "PASS" : "FAIL", id, name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  };
  const auto timed = [&](int id, const char* name, const auto& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("unexpected exception: ") + e.what()};
    }
    report(id, name, out, seconds_since(start));
  };

  timed(1, "pseudoinverse axioms", pinv_axioms);
  timed(2, "complex embedding soundness", embedding_soundness);
  timed(3, "rank additivity identities", rank_additivity);
  timed(4, "projector and rank verdicts agree", verdict_agreement);
  std::vector<SylvesterSystem> kept;
  timed(5, "planted chains solve", [&] { return planted_soundness(kept); });
  timed(6, "inconsistent chains are detected", inconsistency_detected);
  timed(7, "reduced chains stay consistent", [&] { return reduction_consistency(kept); });
  timed(8, "structured layer", structured_layer);
  timed(9, "command line contract", cli_contract);

  return failures;
}
