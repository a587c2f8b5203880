#include "qsylv/io.hpp"

#include <utility>

#include "json.hpp"

namespace qsylv {

namespace {

using nlohmann::json;

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

const json& field(const json& j, const char* name, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError(path + "." + name + ": missing");
  return *it;
}

Index index_field(const json& j, const char* name, const std::string& path) {
  const json& v = field(j, name, path);
  if (!v.is_number_integer()) throw ParseError(path + "." + name + ": expected an integer");
  return v.get<Index>();
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

QuatMatrix matrix_from_json(const json& j, const std::string& path) {
  const Index rows = index_field(j, "rows", path);
  const Index cols = index_field(j, "cols", path);
  if (rows < 0 || cols < 0) throw ParseError(path + ": dimensions must be nonnegative");
  const json& data = field(j, "data", path);
  if (!data.is_array() || static_cast<Index>(data.size()) != rows) {
    throw ParseError(path + ".data: expected " + std::to_string(rows) + " rows");
  }
  QuatMatrix out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = data[static_cast<std::size_t>(r)];
    const std::string rpath = path + ".data[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ParseError(rpath + ": expected " + std::to_string(cols) + " entries, got " +
                       std::to_string(row.is_array() ? row.size() : 0));
    }
    for (Index c = 0; c < cols; ++c) {
      const json& q = row[static_cast<std::size_t>(c)];
      const std::string qpath = rpath + "[" + std::to_string(c) + "]";
      if (!q.is_array() || q.size() != 4) {
        throw ParseError(qpath + ": expected 4 components");
      }
      out(r, c) = Quaternion(number_at(q[0], qpath), number_at(q[1], qpath),
                             number_at(q[2], qpath), number_at(q[3], qpath));
    }
  }
  return out;
}

json matrix_to_json(const QuatMatrix& m) {
  json data = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      const Quaternion& q = m(r, c);
      row.push_back(json::array({q.w, q.x, q.y, q.z}));
    }
    data.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

std::vector<QuatMatrix> matrix_list(const json& j, const char* name, const std::string& path) {
  const json& arr = field(j, name, path);
  const std::string apath = path + "." + name;
  if (!arr.is_array()) throw ParseError(apath + ": expected an array");
  std::vector<QuatMatrix> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(matrix_from_json(arr[i], apath + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> number_list(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw ParseError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(number_at(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json matrices_to_json(const std::vector<QuatMatrix>& ms) {
  json arr = json::array();
  for (const auto& m : ms) arr.push_back(matrix_to_json(m));
  return arr;
}

std::string finish(const json& j) { return j.dump(2) + "\n"; }

void attach_oracle(json& j, const OracleAnnotation* oracle) {
  if (!oracle) return;
  json o{{"consistent", oracle->consistent}};
  if (oracle->residual) o["residual"] = *oracle->residual;
  j["oracle"] = std::move(o);
}

SylvesterSystem system_from_json(const json& j) {
  const Index k = index_field(j, "k", "system");
  const json& eqs = field(j, "equations", "system");
  if (!eqs.is_array() || static_cast<Index>(eqs.size()) != k) {
    throw ParseError("system.k: does not match the number of equations");
  }
  SylvesterSystem sys;
  sys.eqs.reserve(eqs.size());
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const std::string path = "equations[" + std::to_string(i) + "]";
    const json& e = eqs[i];
    FourTermEquation eq;
    eq.A = matrix_from_json(field(e, "A", path), path + ".A");
    eq.B = matrix_from_json(field(e, "B", path), path + ".B");
    eq.C = matrix_from_json(field(e, "C", path), path + ".C");
    eq.D = matrix_from_json(field(e, "D", path), path + ".D");
    eq.F = matrix_from_json(field(e, "F", path), path + ".F");
    eq.G = matrix_from_json(field(e, "G", path), path + ".G");
    eq.E = matrix_from_json(field(e, "E", path), path + ".E");
    sys.eqs.push_back(std::move(eq));
  }
  sys.validate();
  return sys;
}

PhiSystem phi_system_from_json(const json& j) {
  const json& axis = field(j, "axis", "system");
  if (!axis.is_array() || axis.size() != 3) {
    throw ParseError("system.axis: expected 3 components");
  }
  PhiSystem ps;
  ps.phi = Involution::from_axis(number_at(axis[0], "system.axis"),
                                 number_at(axis[1], "system.axis"),
                                 number_at(axis[2], "system.axis"));
  const Index k = index_field(j, "k", "system");
  const json& eqs = field(j, "equations", "system");
  if (!eqs.is_array() || static_cast<Index>(eqs.size()) != k) {
    throw ParseError("system.k: does not match the number of equations");
  }
  ps.eqs.reserve(eqs.size());
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const std::string path = "equations[" + std::to_string(i) + "]";
    const json& e = eqs[i];
    PhiEquation eq;
    eq.A = matrix_from_json(field(e, "A", path), path + ".A");
    eq.C = matrix_from_json(field(e, "C", path), path + ".C");
    eq.F = matrix_from_json(field(e, "F", path), path + ".F");
    eq.E = matrix_from_json(field(e, "E", path), path + ".E");
    ps.eqs.push_back(std::move(eq));
  }
  ps.validate();
  return ps;
}

}  // namespace

std::string write_matrix(const QuatMatrix& m) { return finish(matrix_to_json(m)); }

std::string write_system(const SylvesterSystem& sys) {
  json j{{"k", sys.k()}, {"equations", json::array()}};
  for (const auto& eq : sys.eqs) {
    j["equations"].push_back(json{{"A", matrix_to_json(eq.A)},
                                  {"B", matrix_to_json(eq.B)},
                                  {"C", matrix_to_json(eq.C)},
                                  {"D", matrix_to_json(eq.D)},
                                  {"E", matrix_to_json(eq.E)},
                                  {"F", matrix_to_json(eq.F)},
                                  {"G", matrix_to_json(eq.G)}});
  }
  return finish(j);
}

std::string write_phi_system(const PhiSystem& ps) {
  const auto& n = ps.phi.axis();
  json j{{"axis", json::array({n[0], n[1], n[2]})},
         {"k", ps.k()},
         {"equations", json::array()}};
  for (const auto& eq : ps.eqs) {
    j["equations"].push_back(json{{"A", matrix_to_json(eq.A)},
                                  {"C", matrix_to_json(eq.C)},
                                  {"E", matrix_to_json(eq.E)},
                                  {"F", matrix_to_json(eq.F)}});
  }
  return finish(j);
}

QuatMatrix parse_matrix(const std::string& text) {
  return matrix_from_json(parse_text(text), "matrix");
}

SylvesterSystem parse_system(const std::string& text) {
  return system_from_json(parse_text(text));
}

PhiSystem parse_phi_system(const std::string& text) {
  return phi_system_from_json(parse_text(text));
}

ParsedInstance parse_instance(const std::string& text) {
  const json j = parse_text(text);
  ParsedInstance out;
  if (j.is_object() && j.contains("axis")) {
    out.structured = phi_system_from_json(j);
  } else {
    out.general = system_from_json(j);
  }
  return out;
}

ParsedSolution parse_solution(const std::string& text) {
  const json j = parse_text(text);
  ParsedSolution out;
  if (j.is_object() && j.contains("Y")) {
    SystemSolution sol;
    sol.X = matrix_list(j, "X", "solution");
    sol.Y = matrix_list(j, "Y", "solution");
    sol.Z = matrix_list(j, "Z", "solution");
    if (j.contains("residuals")) sol.residuals = number_list(j["residuals"], "solution.residuals");
    out.general = std::move(sol);
  } else {
    PhiSolution sol;
    sol.X = matrix_list(j, "X", "solution");
    sol.Z = matrix_list(j, "Z", "solution");
    if (j.contains("residuals")) sol.residuals = number_list(j["residuals"], "solution.residuals");
    out.structured = std::move(sol);
  }
  return out;
}

std::string write_solution(const SystemSolution& sol, const OracleAnnotation* oracle) {
  json j{{"X", matrices_to_json(sol.X)},
         {"Y", matrices_to_json(sol.Y)},
         {"Z", matrices_to_json(sol.Z)},
         {"residuals", sol.residuals}};
  attach_oracle(j, oracle);
  return finish(j);
}

std::string write_phi_solution(const PhiSolution& sol, const OracleAnnotation* oracle) {
  json j{{"X", matrices_to_json(sol.X)},
         {"Z", matrices_to_json(sol.Z)},
         {"residuals", sol.residuals}};
  attach_oracle(j, oracle);
  return finish(j);
}

std::string write_report(const ConsistencyReport& report, const OracleAnnotation* oracle) {
  json conds = json::array();
  for (const auto& c : report.conditions) {
    conds.push_back(json{{"family", family_name(c.family)},
                         {"m", c.m},
                         {"n", c.n},
                         {"lhs_rank", c.lhs_rank},
                         {"rhs_rank", c.rhs_rank},
                         {"margin_lhs", c.margin_lhs},
                         {"margin_rhs", c.margin_rhs},
                         {"pass", c.pass}});
  }
  json j{{"conditions", std::move(conds)}, {"consistent", report.consistent}};
  attach_oracle(j, oracle);
  return finish(j);
}

std::string write_rank(const RankResult& r) {
  return finish(json{{"rank", r.rank},
                     {"singular_values", r.singular_values},
                     {"tol_used", r.tol_used}});
}

std::string write_verify(const VerifySummary& v) {
  return finish(json{{"ok", v.ok},
                     {"tol", v.tol},
                     {"residuals", v.residuals},
                     {"z_defects", v.z_defects}});
}

}  // namespace qsylv
