#ifndef CQSENSE_VALIDATE_HPP
#define CQSENSE_VALIDATE_HPP

#include <string>
#include <vector>

namespace cqsense {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Error text when the check threw.
  std::string detail;
};

struct ValidationOptions {
  /// ECMAScript regex matched against check names; empty selects all.
  std::string filter;
  /// Relative error injected into the c₂ coefficient while the checks run.
  double c2_error = 0.0;
};

std::vector<std::string> validation_check_names();
std::vector<CheckResult> run_validation(const ValidationOptions& options);

/// Fixed-width table, one line per check, plus a summary line.
std::string format_validation_table(const std::vector<CheckResult>& results);

}  // namespace cqsense

#endif  // CQSENSE_VALIDATE_HPP
