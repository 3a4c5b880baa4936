#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "karst/mesh.hpp"

namespace karst {

struct PropertyCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=" or ">="
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::vector<PropertyCheck> checks;

  void add(const std::string& check_name, double value, const std::string& relation, double bound);
};

struct PropertyConfig {
  std::uint64_t seed = 42;
};

struct PropertyReport {
  std::vector<SuiteResult> suites;

  bool all_passed() const;
  std::string to_json() const;
};

/// Empirical validation suites: unisolvence, the zero-mean-jump property of
/// the nonconforming families, bubble inverse inequalities across an
/// aspect-ratio sweep, the interpolation estimates, coercivity sampling,
/// alignment-measure bounds and Galerkin orthogonality.
PropertyReport property_suites(const PropertyConfig& cfg = {});

// Individual suites (used by the acceptance tests as well).
SuiteResult suite_unisolvence();
SuiteResult suite_cr_property(std::uint64_t seed);
SuiteResult suite_inverse_inequalities(std::uint64_t seed);
SuiteResult suite_clement_estimates(std::uint64_t seed);
SuiteResult suite_coercivity(std::uint64_t seed);
SuiteResult suite_alignment_bounds(std::uint64_t seed);
SuiteResult suite_galerkin_orthogonality();

}  // namespace karst
