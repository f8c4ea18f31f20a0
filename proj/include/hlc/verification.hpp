#pragma once

#include <string>
#include <vector>

namespace hlc {

struct CheckResult {
  std::string name;
  double value = 0.0;      ///< residual, margin or minimum eigenvalue
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  bool valid = false;      ///< every check passes
  bool certified = false;  ///< valid, and every external bound it relies on is a published value
  std::vector<CheckResult> checks;

  void add(std::string name, double value, double tolerance, bool pass);
  /// First failing check, or null.
  const CheckResult* first_failure() const;
  std::string summary() const;
};

}  // namespace hlc
