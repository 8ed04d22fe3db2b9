#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mbp/bip.hpp"
#include "mbp/error.hpp"

namespace mbp {

// # mbp-binary-program format-version 1
// vars <n>
// label <j> <text>
// maximize <c_0> ... <c_{n-1}>
// subject-to <a_0> ... <a_{n-1}> <= <d>
void write_program(std::ostream& os, const BinaryProgram& p) {
  os << "# mbp-binary-program format-version 1\n";
  os << std::setprecision(17);
  os << "vars " << p.num_vars << '\n';
  for (std::size_t j = 0; j < p.var_labels.size(); ++j) {
    os << "label " << j << ' ' << p.var_labels[j] << '\n';
  }
  os << "maximize";
  for (double c : p.objective) os << ' ' << c;
  os << '\n';
  for (const auto& con : p.constraints) {
    os << "subject-to";
    for (double a : con.coefficients) os << ' ' << a;
    os << " <= " << con.bound << '\n';
  }
}

BinaryProgram read_program(std::istream& is) {
  BinaryProgram p;
  std::string line;
  int line_no = 0;
  bool have_vars = false;
  auto fail = [&](const std::string& what) {
    throw InputError("program line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "vars") {
      if (!(ls >> p.num_vars)) fail("bad vars record");
      have_vars = true;
      continue;
    }
    if (!have_vars) fail("'vars' must come first");
    if (kind == "label") {
      std::size_t j = 0;
      std::string text;
      if (!(ls >> j) || j >= p.num_vars) fail("bad label index");
      std::getline(ls >> std::ws, text);
      if (p.var_labels.empty()) p.var_labels.resize(p.num_vars);
      p.var_labels[j] = text;
    } else if (kind == "maximize") {
      p.objective.resize(p.num_vars);
      for (auto& c : p.objective) {
        if (!(ls >> c)) fail("objective too short");
      }
    } else if (kind == "subject-to") {
      LinearConstraint con;
      con.coefficients.resize(p.num_vars);
      for (auto& a : con.coefficients) {
        if (!(ls >> a)) fail("constraint too short");
      }
      std::string le;
      if (!(ls >> le >> con.bound) || le != "<=") fail("expected '<= bound'");
      p.constraints.push_back(std::move(con));
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  if (!have_vars) throw InputError("program: missing 'vars' record");
  if (p.objective.empty() && p.num_vars > 0) throw InputError("program: missing objective");
  p.validate();
  return p;
}

}  // namespace mbp
