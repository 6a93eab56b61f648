#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace blockcode::cli {

enum class VerifyLevel { Quick, Full };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle suites: enumeration, conditional laws, exact probabilities, finite
/// difference gradients, projections, closed forms, quadrature and codec
/// recovery. The full level widens every sweep.
std::vector<CheckResult> run_checks(VerifyLevel level, std::uint64_t seed,
                                    const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace blockcode::cli
