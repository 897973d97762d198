#include "slicegame/abrd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace slicegame {

EquilibriumResult abrd(const Scenario &scenario, const AbrdConfig &config, const AbrdObserver &observer) {
  config.validate();
  const std::size_t tenants = scenario.num_tenants();
  const std::size_t cells = scenario.num_cells();

  Matrix init(tenants, cells);
  for (std::size_t i = 0; i < tenants; ++i)
    for (std::size_t j = 0; j < cells; ++j) init(i, j) = scenario.shares()[i] / static_cast<double>(cells);
  WeightProfile profile(std::move(init));

  std::mt19937_64 rng(config.rng_seed);
  std::vector<std::size_t> order(tenants);
  std::iota(order.begin(), order.end(), std::size_t{0});

  SolverDiagnostics diag;
  diag.converged = false;
  std::uint64_t stream = 0;
  for (int round = 1; round <= config.max_rounds; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    double max_change = 0.0;
    for (std::size_t i : order) {
      const BestResponse br = best_response(scenario, i, profile, config, stream++);
      ++diag.best_response_calls;
      if (!br.converged) ++diag.stalled_best_responses;
      const auto old = profile.tenant(i);
      for (std::size_t j = 0; j < cells; ++j) max_change = std::max(max_change, std::abs(br.weights[j] - old[j]));
      profile = profile.with_tenant(i, br.weights);
      if (observer) observer(round, i, profile);
    }
    diag.rounds = round;
    if (max_change < config.tolerance) {
      diag.converged = true;
      break;
    }
  }

  EquilibriumResult result = make_result(scenario, std::move(profile), SolveMethod::abrd);
  diag.homogeneous = result.diagnostics.homogeneous;
  diag.multipliers = std::move(result.diagnostics.multipliers);
  diag.locally_concave = std::move(result.diagnostics.locally_concave);
  result.diagnostics = std::move(diag);
  return result;
}

} // namespace slicegame
