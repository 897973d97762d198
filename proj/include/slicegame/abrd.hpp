#pragma once

// Asynchronous best-response dynamics: tenants re-optimize one at a time, in
// a freshly shuffled order each round, until no weight moves by more than
// the tolerance.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "slicegame/cuckoo.hpp"
#include "slicegame/equilibrium.hpp"
#include "slicegame/model.hpp"

namespace slicegame {

enum class BestResponseMethod { gradient, heuristic };

struct AbrdConfig {
  double tolerance = 1e-8; // max absolute weight change over a round
  int max_rounds = 500;
  std::uint64_t rng_seed = 1;
  BestResponseMethod br_method = BestResponseMethod::gradient;
  int br_iters = 500;
  CuckooParams cuckoo{};

  void validate() const;
};

struct BestResponse {
  std::vector<double> weights;
  double revenue = 0.0;
  double start_revenue = 0.0;
  int iterations = 0;
  bool converged = false;
  // max_j |g_j - mean(g)| and mean(g) at the returned weights
  double projected_gradient = 0.0;
  double multiplier = 0.0;
};

/// Tenant `tenant`'s revenue-maximizing weights given everybody else's row in
/// `profile`. The tenant's current row is the starting point. The budget is
/// imposed as an equality: |B| - 1 free weights, the last absorbs the rest.
/// `stream` decorrelates heuristic runs that share a config seed.
BestResponse best_response(const Scenario &scenario, std::size_t tenant, const WeightProfile &profile,
                           const AbrdConfig &config, std::uint64_t stream = 0);

/// Called after every best response with (round, tenant, profile).
using AbrdObserver = std::function<void(int, std::size_t, const WeightProfile &)>;

/// Runs the dynamics from the uniform split s_i / |B|. A run that exhausts
/// max_rounds is returned with diagnostics.converged = false.
EquilibriumResult abrd(const Scenario &scenario, const AbrdConfig &config,
                       const AbrdObserver &observer = {});

/// Largest relative revenue gain any tenant finds from a randomized restart
/// of its optimizer against `profile`. Near zero at a Nash equilibrium.
double epsilon_nash_gap(const Scenario &scenario, const WeightProfile &profile,
                        const AbrdConfig &config, std::uint64_t seed);

} // namespace slicegame
