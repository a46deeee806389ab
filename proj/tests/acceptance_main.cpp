// Runs the acceptance criteria and prints one line per criterion.
#include <iostream>

#include "condgrad/acceptance.hpp"

int main() {
  const auto results = condgrad::acceptance::run_all();
  for (const auto& r : results) std::cout << condgrad::acceptance::format_line(r) << '\n';
  const bool ok = condgrad::acceptance::suite_passed(results);
  std::cout << (ok ? "acceptance: PASSED" : "acceptance: FAILED") << '\n';
  return ok ? 0 : 1;
}
