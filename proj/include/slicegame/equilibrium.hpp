#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "slicegame/model.hpp"

namespace slicegame {

enum class SolveMethod { proposed, abrd };

std::string_view to_string(SolveMethod m);

struct SolverDiagnostics {
  bool converged = true;
  int rounds = 0;
  int best_response_calls = 0;
  int stalled_best_responses = 0; // best responses that hit their iteration cap
  bool homogeneous = false;
  // Lagrange multiplier estimate per tenant (mean own-gradient component).
  std::vector<double> multipliers;
  // True for a tenant when every diagonal second derivative is negative at
  // the returned weights, i.e. its revenue is locally strictly concave.
  std::vector<bool> locally_concave;
};

struct EquilibriumResult {
  WeightProfile weights;
  MarketState state;
  SolveMethod method = SolveMethod::proposed;
  double kkt_residual = 0.0;
  double budget_residual = 0.0;
  SolverDiagnostics diagnostics;
};

/// Subscription ratio of a cell when every tenant splits its share in
/// proportion to subscriber mass: root of s - gamma^beta (sum s_t^beta) (1-s)^(1-beta).
PenetrationRoot proposed_penetration(double gamma, double beta, std::span<const double> shares);

/// Cell-independent tenant fractions s_i^beta / sum_t s_t^beta.
std::vector<double> proposed_fractions(std::span<const double> shares, double beta);

/// Candidate equilibrium: omega_i^(j) = s_i sigma^(j) n^(j) / sum_k sigma^(k) n^(k).
/// Exact when homogeneity_check() holds, an approximation otherwise.
EquilibriumResult proposed_solution(const Scenario &scenario);

struct PenetrationBounds {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Range of the equilibrium subscription ratio over all share vectors:
/// sigma_max at equal shares, sigma_min when one tenant holds everything.
PenetrationBounds penetration_bounds(double gamma, double beta, std::size_t num_tenants);

/// max_i |sum_j omega_i^(j) - s_i|
double budget_residual(const Scenario &scenario, const WeightProfile &weights);

/// Largest relative deviation of any own-gradient component from the
/// tenant's multiplier estimate (the component mean), combined by max with
/// the budget residual. Zero at a budget-binding stationary profile.
double kkt_residual(const Scenario &scenario, const WeightProfile &weights);

/// True iff every cell has r0 = 0, or every cell has the same finite
/// normalized capacity (1e-9 relative).
bool homogeneity_check(const Scenario &scenario);

/// Closed-form KKT multipliers of the proposed solution for homogeneous
/// scenarios. Throws ValidationError when the scenario is heterogeneous.
std::vector<double> homogeneous_multipliers(const Scenario &scenario);

/// Fills weights-dependent fields (state, residuals, multipliers, concavity).
EquilibriumResult make_result(const Scenario &scenario, WeightProfile weights, SolveMethod method);

} // namespace slicegame
