#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsylv/linalg.hpp"
#include "qsylv/phi.hpp"
#include "qsylv/quat_matrix.hpp"
#include "qsylv/sylvester.hpp"

namespace qsylv {

/// JSON wire formats. All writers emit two-space indented JSON with sorted
/// keys and a trailing newline, so equal values give byte-equal output.
///
/// Matrix:      {"rows": R, "cols": C, "data": [[[w,x,y,z] x C] x R]}
/// System:      {"k": K, "equations": [{"A": M, ..., "G": M, "E": M} x K]}
/// PhiSystem:   {"axis": [x,y,z], "k": K, "equations": [{"A","C","F","E"} x K]}
/// Solution:    {"X": [M x K], "Y": [M x K], "Z": [M x K+1], "residuals": [..]}
/// PhiSolution: {"X": [M x K], "Z": [M x K+1], "residuals": [..]}

std::string write_matrix(const QuatMatrix& m);
std::string write_system(const SylvesterSystem& sys);
std::string write_phi_system(const PhiSystem& ps);

QuatMatrix parse_matrix(const std::string& text);
SylvesterSystem parse_system(const std::string& text);
PhiSystem parse_phi_system(const std::string& text);

/// Dispatches on the "axis" key: present means phi-structured.
struct ParsedInstance {
  std::optional<SylvesterSystem> general;
  std::optional<PhiSystem> structured;
};
ParsedInstance parse_instance(const std::string& text);

/// Dispatches on the "Y" key: present means a general-system solution.
struct ParsedSolution {
  std::optional<SystemSolution> general;
  std::optional<PhiSolution> structured;
};
ParsedSolution parse_solution(const std::string& text);

/// Verdict of the realified cross-check, attached under an "oracle" key.
struct OracleAnnotation {
  bool consistent = false;
  std::optional<double> residual;
};

std::string write_solution(const SystemSolution& sol, const OracleAnnotation* oracle = nullptr);
std::string write_phi_solution(const PhiSolution& sol, const OracleAnnotation* oracle = nullptr);
std::string write_report(const ConsistencyReport& report, const OracleAnnotation* oracle = nullptr);
std::string write_rank(const RankResult& r);

struct VerifySummary {
  bool ok = false;
  double tol = 0.0;
  std::vector<double> residuals;
  std::vector<double> z_defects;  // phi-Hermitian defects; empty for general systems
};
std::string write_verify(const VerifySummary& v);

}  // namespace qsylv
