// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <cstdlib>
#include <iostream>
#include <string>

#include "verify_suite.hpp"

int main(int argc, char** argv) {
  covqec::verify::SuiteOptions o;
  if (argc > 1) o.filter = argv[1];
  if (const char* s = std::getenv("COVQEC_TOL_SCALE")) o.tolerance_scale = std::stod(s);
  auto results = covqec::verify::run_suite(o, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass() ? 0 : 1;
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all passed")
            << std::endl;
  return failed == 0 && !results.empty() ? 0 : 1;
}
