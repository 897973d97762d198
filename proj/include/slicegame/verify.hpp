#pragma once

// Numerical self-checks of a scenario, as run by `slicegame_cli verify`.

#include <string>
#include <vector>

#include "slicegame/abrd.hpp"

namespace slicegame {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;     // worst observed error
  double threshold = 0.0; // pass iff value < threshold
};

/// Penetration-root residuals, capacity conservation, logit fixed point,
/// finite-difference agreement of first and second derivatives, and the
/// KKT residual: of the proposed solution when cells are homogeneous,
/// otherwise of the ABRD equilibrium computed with `config`.
std::vector<CheckResult> verify_scenario(const Scenario &scenario, const AbrdConfig &config);

} // namespace slicegame
