// Tiny DIMACS front end over the library DPLL. Test helper only: it speaks the
// competition output convention so the harness can drive it like a real solver.
#include <fstream>
#include <iostream>
#include <sstream>

#include "ol/circuits.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: mini_sat <file.cnf>\n";
    return 1;
  }
  std::ifstream in(argv[argc - 1]);
  if (!in) {
    std::cerr << "cannot open " << argv[argc - 1] << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  ol::CnfInstance cnf;
  try {
    cnf = ol::parse_dimacs(ss.str());
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  std::vector<bool> model;
  if (!ol::dpll_satisfiable(cnf, &model)) {
    std::cout << "s UNSATISFIABLE\n";
    return 20;
  }
  std::cout << "s SATISFIABLE\nv";
  for (std::uint32_t v = 1; v <= cnf.num_vars; ++v) std::cout << ' ' << (model[v] ? "" : "-") << v;
  std::cout << " 0\n";
  return 10;
}
