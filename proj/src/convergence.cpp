#include "expfem/convergence.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "expfem/assemble.hpp"
#include "expfem/errors.hpp"

namespace expfem {

namespace {

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = std::numeric_limits<double>::quiet_NaN();
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace

template <int Dim>
ConvergenceTable run_convergence(const ManufacturedCase<Dim>& mc, const std::vector<int>& levels,
                                 const std::vector<double>& eps_list, SolveMethod method) {
  ConvergenceTable table;
  table.case_name = mc.name;
  for (double eps : eps_list) {
    double prev_u = 0, prev_j = 0;
    bool first = true;
    for (int n : levels) {
      const SimplicialMesh mesh =
          (Dim == 2) ? build_unit_square_mesh(n) : build_unit_cube_mesh(n);
      const ProblemConfig<Dim> cfg = mc.config(eps);
      const SparseSystem sys = assemble<Dim>(mesh, cfg);
      const ReducedSystem red = apply_dirichlet<Dim>(mesh, sys, cfg);
      const Solution sol = solve(red, method);
      const ErrorPair err = l2_errors<Dim>(mesh, cfg, sol.coefficients, mc);

      ConvergenceRow row;
      row.inv_h = n;
      row.eps = eps;
      row.err_solution = err.solution;
      row.err_flux = err.flux;
      if (!first) {
        row.order_solution = std::log2(prev_u / err.solution);
        row.order_flux = std::log2(prev_j / err.flux);
      }
      prev_u = err.solution;
      prev_j = err.flux;
      first = false;
      table.rows.push_back(row);
    }
  }
  return table;
}

void write_csv(const ConvergenceTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "inv_h,eps,err_solution,order_solution,err_flux,order_flux\n";
  for (const auto& r : table.rows) {
    out << r.inv_h << ',' << shortest(r.eps) << ',' << shortest(r.err_solution) << ','
        << shortest(r.order_solution) << ',' << shortest(r.err_flux) << ','
        << shortest(r.order_flux) << '\n';
  }
}

ConvergenceTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  ConvergenceTable table;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ConvergenceRow r;
    std::getline(ss, field, ',');
    r.inv_h = std::stoi(field);
    std::getline(ss, field, ',');
    r.eps = parse_double(field);
    std::getline(ss, field, ',');
    r.err_solution = parse_double(field);
    std::getline(ss, field, ',');
    r.order_solution = parse_double(field);
    std::getline(ss, field, ',');
    r.err_flux = parse_double(field);
    std::getline(ss, field, ',');
    r.order_flux = parse_double(field);
    table.rows.push_back(r);
  }
  return table;
}

template ConvergenceTable run_convergence<2>(const ManufacturedCase<2>&, const std::vector<int>&,
                                             const std::vector<double>&, SolveMethod);
template ConvergenceTable run_convergence<3>(const ManufacturedCase<3>&, const std::vector<int>&,
                                             const std::vector<double>&, SolveMethod);

}  // namespace expfem
