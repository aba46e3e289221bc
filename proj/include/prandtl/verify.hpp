#pragma once

// Built-in oracle and property suites, reported as named checks with the
// measured value and the tolerance it was held to.

#include <string>
#include <vector>

namespace prandtl {

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation;  ///< "<=", ">=" or "==" (the latter for flags)
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;
  double seconds = 0.0;
  bool passed() const noexcept;
};

/// Known suites: treves, lp, corrector, heat, g0.
const std::vector<std::string>& verify_suites();

/// Runs one suite, or every suite for "all". Unknown names throw ConfigError naming "suite".
std::vector<VerifyReport> run_verify(const std::string& suite);

VerifyReport verify_treves();
VerifyReport verify_lp();
VerifyReport verify_corrector();
VerifyReport verify_heat();
VerifyReport verify_g0();

std::string verify_json(const std::vector<VerifyReport>& reports);

}  // namespace prandtl
