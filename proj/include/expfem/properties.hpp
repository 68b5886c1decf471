#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace expfem {

struct PropertyResult {
  std::string name;
  bool pass = true;
  int checks = 0;
  int failures = 0;
  double worst = 0.0;  // worst observed violation (units depend on the check)
  std::string detail;
};

struct PropertyOptions {
  std::uint64_t seed = 20240817;
  bool quick = false;
  // Multiplicative perturbation injected into the 2D-Bernoulli evaluation of
  // the spline systems; nonzero values are a negative control that must trip
  // the structural checks.
  double bernoulli_perturbation = 0.0;
};

/// Machine-checkable sweep over the structural results: Bernoulli oracle
/// agreement, DOF traces, conformity, beta = 0 consistency, contained
/// constants, kernel preservation, commutativity, discrete-complex
/// composition, determinant positivity, and Piola covariance.
std::vector<PropertyResult> run_property_suites(const PropertyOptions& opts = {});

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace expfem
