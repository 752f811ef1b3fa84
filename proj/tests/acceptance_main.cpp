#include <cstdlib>
#include <iostream>
#include <string>

#include "spherelab/acceptance.hpp"

int main(int argc, char** argv) {
  spherelab::AcceptanceOptions options;
  if (argc > 1) options.workers = std::atoi(argv[1]);
  int failed = 0;
  for (int id = 1; id <= spherelab::kAcceptanceCriteria; ++id) {
    const spherelab::AcceptanceResult r = spherelab::run_criterion(id, options);
    std::cout << spherelab::format_acceptance_line(r, true) << std::endl;
    if (!r.passed()) ++failed;
  }
  std::cout << (failed == 0 ? "acceptance: all criteria passed" : "acceptance: " + std::to_string(failed) + " failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
