#include "hlc/verification.hpp"

#include <sstream>

namespace hlc {

void VerificationReport::add(std::string name, double value, double tolerance, bool pass) {
  checks.push_back({std::move(name), value, tolerance, pass});
}

const CheckResult* VerificationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.pass) return &c;
  return nullptr;
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  os << (valid ? "valid" : "INVALID") << (certified ? ", certified" : ", not certified");
  for (const auto& c : checks) os << "; " << c.name << "=" << c.value << (c.pass ? " ok" : " FAIL");
  return os.str();
}

}  // namespace hlc
