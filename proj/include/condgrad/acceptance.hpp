#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace condgrad::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Advisory criteria are reported but never fail the suite.
  bool advisory = false;
  std::string detail;
};

struct Options {
  /// Called with each result as soon as it is known.
  std::function<void(const CriterionResult&)> on_result;
};

/// Runs every acceptance criterion over the default benchmark plan.
std::vector<CriterionResult> run_all(const Options& options = {});

bool suite_passed(const std::vector<CriterionResult>& results);

std::string format_line(const CriterionResult& r);

}  // namespace condgrad::acceptance
