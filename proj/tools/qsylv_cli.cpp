#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsylv/generate.hpp"
#include "qsylv/io.hpp"
#include "qsylv/linalg.hpp"
#include "qsylv/oracle.hpp"
#include "qsylv/phi.hpp"
#include "qsylv/sylvester.hpp"

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qsylv::Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qsylv::Error("cannot open " + path + " for writing");
  out << text;
}

std::optional<double> opt_value(const CLI::Option* opt, double value) {
  if (opt->count() > 0) return value;
  return std::nullopt;
}

struct CommonArgs {
  std::string input;
  std::string out;
  double tol_rank = 0.0;
  CLI::Option* tol_rank_opt = nullptr;
  double tol_res = 0.0;
  bool oracle = false;
};

int run_check(const CommonArgs& args, bool strict_phi) {
  const qsylv::ParsedInstance inst = qsylv::parse_instance(read_input(args.input));
  const std::optional<double> tol_rank = opt_value(args.tol_rank_opt, args.tol_rank);
  qsylv::ConsistencyReport rep;
  qsylv::RealLinearSystem rls;
  if (inst.general) {
    rep = qsylv::check_system(*inst.general, tol_rank);
    if (args.oracle) rls = qsylv::realify(*inst.general);
  } else {
    rep = qsylv::check_phi_system(*inst.structured, tol_rank, strict_phi);
    if (args.oracle) rls = qsylv::realify(*inst.structured);
  }
  std::optional<qsylv::OracleAnnotation> ann;
  if (args.oracle) {
    qsylv::OracleAnnotation a;
    a.consistent = qsylv::oracle_consistent(rls).consistent;
    ann = a;
  }
  write_output(args.out, qsylv::write_report(rep, ann ? &*ann : nullptr));
  return rep.consistent ? 0 : 1;
}

int run_solve(const CommonArgs& args, bool random_params, std::uint64_t seed) {
  const qsylv::ParsedInstance inst = qsylv::parse_instance(read_input(args.input));
  qsylv::SolveOptions opts;
  opts.tol_rank = opt_value(args.tol_rank_opt, args.tol_rank);
  opts.tol_res = args.tol_res;
  if (random_params) opts.param_seed = seed;

  std::optional<qsylv::RealLinearSystem> rls;
  if (args.oracle) {
    rls = inst.general ? qsylv::realify(*inst.general) : qsylv::realify(*inst.structured);
  }
  const auto annotation = [&]() -> std::optional<qsylv::OracleAnnotation> {
    if (!rls) return std::nullopt;
    qsylv::OracleAnnotation a;
    a.consistent = qsylv::oracle_consistent(*rls).consistent;
    a.residual = qsylv::oracle_solve(*rls).residual;
    return a;
  };

  try {
    std::string text;
    if (inst.general) {
      const qsylv::SystemSolution sol = qsylv::solve_system(*inst.general, opts);
      const auto ann = annotation();
      text = qsylv::write_solution(sol, ann ? &*ann : nullptr);
    } else {
      const qsylv::PhiSolution sol = qsylv::solve_phi_system(*inst.structured, opts);
      const auto ann = annotation();
      text = qsylv::write_phi_solution(sol, ann ? &*ann : nullptr);
    }
    write_output(args.out, text);
    return 0;
  } catch (const qsylv::InconsistentSystem& e) {
    const auto ann = annotation();
    write_output(args.out, qsylv::write_report(e.report, ann ? &*ann : nullptr));
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int run_verify(const CommonArgs& args, const std::string& solution_path) {
  const qsylv::ParsedInstance inst = qsylv::parse_instance(read_input(args.input));
  const qsylv::ParsedSolution sol = qsylv::parse_solution(read_input(solution_path));
  qsylv::VerifySummary v;
  v.tol = args.tol_res;
  v.ok = true;
  if (inst.general) {
    if (!sol.general) throw qsylv::Error("instance is a general system but the solution is not");
    v.residuals = qsylv::residuals(*inst.general, *sol.general);
    for (qsylv::Index i = 0; i < inst.general->k(); ++i) {
      const double scale = 1.0 + qsylv::fro_norm(inst.general->eqs[static_cast<std::size_t>(i)].E);
      v.ok = v.ok && v.residuals[static_cast<std::size_t>(i)] <= v.tol * scale;
    }
  } else {
    if (!sol.structured) throw qsylv::Error("instance is phi-structured but the solution is not");
    const qsylv::PhiSystem& ps = *inst.structured;
    v.residuals = qsylv::phi_residuals(ps, *sol.structured);
    for (qsylv::Index i = 0; i < ps.k(); ++i) {
      const double scale = 1.0 + qsylv::fro_norm(ps.eqs[static_cast<std::size_t>(i)].E);
      v.ok = v.ok && v.residuals[static_cast<std::size_t>(i)] <= v.tol * scale;
    }
    for (const auto& z : sol.structured->Z) {
      const auto check = qsylv::phi_hermitian_check(ps.phi, z, v.tol);
      v.z_defects.push_back(check.defect);
      v.ok = v.ok && check.pass;
    }
  }
  write_output(args.out, qsylv::write_verify(v));
  return v.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chained quaternion Sylvester equations: check, solve, verify, generate"};
  app.require_subcommand(1);

  CommonArgs check_args, solve_args, verify_args;
  bool strict_phi = false;
  bool random_params = false;
  std::uint64_t solve_seed = 0;

  auto* check = app.add_subcommand("check", "evaluate the rank solvability conditions");
  check->add_option("input", check_args.input, "instance JSON ('-' for stdin)")->required();
  check->add_option("-o,--out", check_args.out, "output path (default stdout)");
  check_args.tol_rank_opt = check->add_option("--tol-rank", check_args.tol_rank, "rank cutoff override");
  check->add_option("--tol-res", check_args.tol_res, "unused for check; accepted for symmetry")
      ->default_val(1e-10);
  check->add_flag("--strict-phi", strict_phi, "also evaluate the mirrored window families");
  check->add_flag("--oracle", check_args.oracle, "annotate with the realified-system verdict");

  auto* solve = app.add_subcommand("solve", "compute a solution or report inconsistency");
  solve->add_option("input", solve_args.input, "instance JSON ('-' for stdin)")->required();
  solve->add_option("-o,--out", solve_args.out, "output path (default stdout)");
  solve_args.tol_rank_opt = solve->add_option("--tol-rank", solve_args.tol_rank, "rank cutoff override");
  solve->add_option("--tol-res", solve_args.tol_res, "per-equation consistency gate")
      ->default_val(1e-10);
  solve->add_flag("--random-params", random_params, "draw free parameters instead of zeros");
  solve->add_option("--seed", solve_seed, "seed for --random-params")->default_val(0);
  solve->add_flag("--oracle", solve_args.oracle, "annotate with the realified-system verdict");

  auto* verify = app.add_subcommand("verify", "recompute residuals of a solution file");
  verify->add_option("input", verify_args.input, "instance JSON ('-' for stdin)")->required();
  std::string solution_path;
  verify->add_option("-s,--solution", solution_path, "solution JSON")->required();
  verify->add_option("-o,--out", verify_args.out, "output path (default stdout)");
  verify->add_option("--tol-res", verify_args.tol_res, "residual acceptance, relative")
      ->default_val(1e-8);

  auto* gen = app.add_subcommand("gen", "generate a deterministic instance");
  qsylv::GenOptions gen_opts;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::vector<double> phi_axis;
  long long gen_k = 1, gen_min = 1, gen_max = 4;
  bool gen_inconsistent = false;
  gen->add_option("--seed", gen_seed, "generator seed")->default_val(0);
  gen->add_option("--k", gen_k, "number of chained equations")->default_val(1);
  gen->add_option("--min-dim", gen_min, "smallest drawn dimension")->default_val(1);
  gen->add_option("--max-dim", gen_max, "largest drawn dimension")->default_val(4);
  gen->add_flag("--inconsistent", gen_inconsistent, "produce a certified inconsistent instance");
  gen->add_option("--deficient", gen_opts.deficient_fraction,
                  "chance of a rank-deficient coefficient")
      ->default_val(0.0);
  gen->add_option("--phi-axis", phi_axis, "involution axis; makes the instance phi-structured")
      ->delimiter(',')
      ->expected(3);
  gen->add_option("-o,--out", gen_out, "output path (default stdout)");

  auto* rank_cmd = app.add_subcommand("rank", "numerical rank of one matrix");
  std::string rank_in, rank_out;
  double rank_tol = 0.0;
  rank_cmd->add_option("input", rank_in, "matrix JSON ('-' for stdin)")->required();
  auto* rank_tol_opt = rank_cmd->add_option("--tol", rank_tol, "rank cutoff override");
  rank_cmd->add_option("-o,--out", rank_out, "output path (default stdout)");

  auto* pinv_cmd = app.add_subcommand("pinv", "Moore-Penrose inverse of one matrix");
  std::string pinv_in, pinv_out;
  double pinv_tol = 0.0;
  pinv_cmd->add_option("input", pinv_in, "matrix JSON ('-' for stdin)")->required();
  auto* pinv_tol_opt = pinv_cmd->add_option("--tol", pinv_tol, "rank cutoff override");
  pinv_cmd->add_option("-o,--out", pinv_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return run_check(check_args, strict_phi);
    if (*solve) return run_solve(solve_args, random_params, solve_seed);
    if (*verify) return run_verify(verify_args, solution_path);
    if (*gen) {
      gen_opts.k = gen_k;
      gen_opts.min_dim = gen_min;
      gen_opts.max_dim = gen_max;
      gen_opts.inconsistent = gen_inconsistent;
      if (!phi_axis.empty()) gen_opts.phi_axis = {phi_axis[0], phi_axis[1], phi_axis[2]};
      const qsylv::GenResult res = qsylv::generate(gen_seed, gen_opts);
      write_output(gen_out, res.general ? qsylv::write_system(*res.general)
                                        : qsylv::write_phi_system(*res.structured));
      return 0;
    }
    if (*rank_cmd) {
      const qsylv::QuatMatrix m = qsylv::parse_matrix(read_input(rank_in));
      write_output(rank_out, qsylv::write_rank(qsylv::rank(m, opt_value(rank_tol_opt, rank_tol))));
      return 0;
    }
    if (*pinv_cmd) {
      const qsylv::QuatMatrix m = qsylv::parse_matrix(read_input(pinv_in));
      write_output(pinv_out, qsylv::write_matrix(qsylv::pinv(m, opt_value(pinv_tol_opt, pinv_tol))));
      return 0;
    }
  } catch (const qsylv::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qsylv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
