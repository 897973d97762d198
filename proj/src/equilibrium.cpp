#include "slicegame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slicegame {

std::string_view to_string(SolveMethod m) {
  return m == SolveMethod::proposed ? "proposed" : "abrd";
}

PenetrationRoot proposed_penetration(double gamma, double beta, std::span<const double> shares) {
  if (std::isinf(gamma)) return {1.0, 0.0, 0};
  double pow_sum = 0.0;
  for (double s : shares) pow_sum += std::pow(s, beta);
  return solve_penetration(std::pow(gamma, beta) * pow_sum, beta);
}

std::vector<double> proposed_fractions(std::span<const double> shares, double beta) {
  std::vector<double> rho(shares.size());
  double total = 0.0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    rho[i] = shares[i] > 0.0 ? std::pow(shares[i], beta) : 0.0;
    total += rho[i];
  }
  for (double &r : rho) r /= total;
  return rho;
}

EquilibriumResult proposed_solution(const Scenario &scenario) {
  const std::size_t cells = scenario.num_cells();
  std::vector<double> mass(cells);
  double total = 0.0;
  for (std::size_t j = 0; j < cells; ++j) {
    const PenetrationRoot root = proposed_penetration(scenario.gammas()[j], scenario.beta(), scenario.shares());
    mass[j] = root.sigma * scenario.cells()[j].n_users;
    total += mass[j];
  }
  Matrix w(scenario.num_tenants(), cells);
  for (std::size_t i = 0; i < scenario.num_tenants(); ++i)
    for (std::size_t j = 0; j < cells; ++j) w(i, j) = scenario.shares()[i] * mass[j] / total;
  return make_result(scenario, WeightProfile(std::move(w)), SolveMethod::proposed);
}

namespace {

double bound_root(double gamma, double beta, double concentration) {
  if (std::isinf(gamma)) return 1.0;
  return solve_penetration(std::pow(gamma, beta) * concentration, beta).sigma;
}

} // namespace

PenetrationBounds penetration_bounds(double gamma, double beta, std::size_t num_tenants) {
  if (!(gamma > 0.0)) throw ValidationError("penetration_bounds: gamma must be > 0");
  if (num_tenants == 0) throw ValidationError("penetration_bounds: need at least one tenant");
  const double lo = bound_root(gamma, beta, 1.0);
  if (num_tenants == 1) return {lo, lo};
  const double hi = bound_root(gamma, beta, std::pow(static_cast<double>(num_tenants), 1.0 - beta));
  return {lo, hi};
}

double budget_residual(const Scenario &scenario, const WeightProfile &weights) {
  double worst = 0.0;
  for (std::size_t i = 0; i < scenario.num_tenants(); ++i) {
    const auto row = weights.tenant(i);
    const double used = std::accumulate(row.begin(), row.end(), 0.0);
    worst = std::max(worst, std::abs(used - scenario.shares()[i]));
  }
  return worst;
}

namespace {

double mean(const std::vector<double> &v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

double kkt_residual(const Scenario &scenario, const WeightProfile &weights) {
  double worst = budget_residual(scenario, weights);
  for (std::size_t i = 0; i < scenario.num_tenants(); ++i) {
    const std::vector<double> g = revenue_gradient(scenario, weights, i);
    const double mu = mean(g);
    for (double gj : g) worst = std::max(worst, std::abs(gj - mu) / mu);
  }
  return worst;
}

bool homogeneity_check(const Scenario &scenario) {
  const auto &cells = scenario.cells();
  if (std::all_of(cells.begin(), cells.end(), [](const CellSpec &c) { return c.r0 == 0.0; }))
    return true;
  const auto &g = scenario.gammas();
  if (std::any_of(g.begin(), g.end(), [](double x) { return std::isinf(x); })) return false;
  const double ref = g.front();
  return std::all_of(g.begin(), g.end(),
                     [ref](double x) { return std::abs(x - ref) <= 1e-9 * std::max(std::abs(ref), std::abs(x)); });
}

std::vector<double> homogeneous_multipliers(const Scenario &scenario) {
  if (!homogeneity_check(scenario))
    throw ValidationError("homogeneous_multipliers: scenario cells are not homogeneous");
  const double beta = scenario.beta();
  const double p = scenario.price();
  const double n = scenario.total_users();
  const PenetrationRoot root = proposed_penetration(scenario.gammas().front(), beta, scenario.shares());
  const double sigma = root.sigma, u = root.complement;
  const std::vector<double> rho = proposed_fractions(scenario.shares(), beta);
  std::vector<double> mu(scenario.num_tenants());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double s = scenario.shares()[i];
    mu[i] = p * beta * n * sigma * rho[i] / (s * ((1.0 - beta) + beta * u)) *
            ((1.0 - beta) * (1.0 - rho[i]) * sigma + (1.0 - s) * u);
  }
  return mu;
}

EquilibriumResult make_result(const Scenario &scenario, WeightProfile weights, SolveMethod method) {
  EquilibriumResult r;
  r.method = method;
  r.state = market_state(scenario, weights);
  r.budget_residual = budget_residual(scenario, weights);
  r.kkt_residual = kkt_residual(scenario, weights);
  r.diagnostics.homogeneous = homogeneity_check(scenario);
  for (std::size_t i = 0; i < scenario.num_tenants(); ++i) {
    r.diagnostics.multipliers.push_back(mean(revenue_gradient(scenario, weights, i)));
    const TenantHessian h = revenue_hessian_diag(scenario, weights, i);
    r.diagnostics.locally_concave.push_back(
        std::all_of(h.diagonal.begin(), h.diagonal.end(), [](double d) { return d < 0.0; }));
  }
  r.weights = std::move(weights);
  return r;
}

} // namespace slicegame
