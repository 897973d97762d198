#include "slicegame/sweeps.hpp"

#include <cmath>
#include <sstream>

#include "slicegame/equilibrium.hpp"

namespace slicegame {

std::string_view to_string(SweepKind kind) {
  switch (kind) {
  case SweepKind::sigma_vs_S_alpha: return "sigma_vs_S_alpha";
  case SweepKind::sigma_vs_S_gamma: return "sigma_vs_S_gamma";
  case SweepKind::rho1_vs_share_bounds: return "rho1_vs_share_bounds";
  case SweepKind::sigma_vs_share_equality: return "sigma_vs_share_equality";
  case SweepKind::het_profile: return "het_profile";
  }
  return "unknown";
}

SweepKind sweep_kind_from_string(std::string_view name) {
  for (SweepKind k : {SweepKind::sigma_vs_S_alpha, SweepKind::sigma_vs_S_gamma, SweepKind::rho1_vs_share_bounds,
                      SweepKind::sigma_vs_share_equality, SweepKind::het_profile})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown sweep kind: " + std::string(name));
}

namespace {

double beta_of(double alpha) { return alpha / (alpha + 1.0); }

std::string label(std::string_view prefix, double v) {
  std::ostringstream os;
  os << prefix << v;
  return os.str();
}

Table sigma_vs_tenants(const SweepParams &p, bool by_alpha) {
  Table t;
  t.columns.push_back("num_tenants");
  const std::vector<double> &series = by_alpha ? p.alphas : p.gammas;
  for (double v : series) t.columns.push_back(label(by_alpha ? "sigma_alpha_" : "sigma_gamma_", v));
  for (int S = 1; S <= p.max_tenants; ++S) {
    std::vector<double> row{static_cast<double>(S)};
    for (double v : series) {
      const double alpha = by_alpha ? v : p.alpha;
      const double gamma = by_alpha ? 1.0 : v;
      row.push_back(penetration_bounds(gamma, beta_of(alpha), static_cast<std::size_t>(S)).sigma_max);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table rho1_bounds(const SweepParams &p) {
  if (p.num_tenants < 2) throw ValidationError("rho1_vs_share_bounds needs at least 2 tenants");
  const double beta = beta_of(p.alpha);
  const auto S = static_cast<std::size_t>(p.num_tenants);
  Table t{{"s1", "rho1_max", "rho1_min"}, {}};
  for (int k = 1; k <= p.grid_points; ++k) {
    const double s1 = static_cast<double>(k) / p.grid_points;
    // remaining share on a single competitor (most favorable for tenant 1)
    std::vector<double> concentrated(S, 0.0);
    concentrated[0] = s1;
    concentrated[1] = 1.0 - s1;
    // remaining share split equally (least favorable)
    std::vector<double> spread(S, (1.0 - s1) / static_cast<double>(S - 1));
    spread[0] = s1;
    t.rows.push_back({s1, proposed_fractions(concentrated, beta)[0], proposed_fractions(spread, beta)[0]});
  }
  return t;
}

Table sigma_vs_equality(const SweepParams &p) {
  const double beta = beta_of(p.alpha);
  const double top = std::pow(static_cast<double>(p.num_tenants), 1.0 - beta);
  Table t;
  t.columns.push_back("share_equality");
  for (double g : p.gammas) t.columns.push_back(label("sigma_gamma_", g));
  for (int k = 0; k < p.grid_points; ++k) {
    const double x = p.grid_points == 1 ? 1.0 : 1.0 + (top - 1.0) * k / (p.grid_points - 1);
    std::vector<double> row{x};
    for (double g : p.gammas) row.push_back(solve_penetration(std::pow(g, beta) * x, beta).sigma);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table het_profile(const SweepParams &p) {
  Table t{{"s1", "cell", "gamma", "w1_proposed", "w1_abrd", "sigma_proposed", "sigma_abrd", "rho1_proposed",
           "rho1_abrd", "abrd_converged"},
          {}};
  for (double s1 : p.share_values) {
    const Scenario sc = heterogeneous_scenario(p, s1);
    const EquilibriumResult prop = proposed_solution(sc);
    const EquilibriumResult eq = abrd(sc, p.abrd);
    for (std::size_t j = 0; j < sc.num_cells(); ++j)
      t.rows.push_back({s1, static_cast<double>(j + 1), sc.gammas()[j], prop.weights(0, j), eq.weights(0, j),
                        prop.state.sigma[j], eq.state.sigma[j], prop.state.rho(j, 0), eq.state.rho(j, 0),
                        eq.diagnostics.converged ? 1.0 : 0.0});
  }
  return t;
}

} // namespace

Scenario heterogeneous_scenario(const SweepParams &params, double s1) {
  if (!(s1 > 0.0 && s1 < 1.0)) throw ValidationError("heterogeneous scenario: s1 must lie in (0, 1)");
  const auto S = static_cast<std::size_t>(params.num_tenants);
  std::vector<double> shares(S, (1.0 - s1) / static_cast<double>(S - 1));
  shares[0] = s1;
  return Scenario::from_gammas(params.het_users, params.het_gammas, std::move(shares), 1.0, params.alpha);
}

Table sweep(SweepKind kind, const SweepParams &params) {
  if (params.grid_points < 1) throw ValidationError("sweep: grid_points must be >= 1");
  switch (kind) {
  case SweepKind::sigma_vs_S_alpha: return sigma_vs_tenants(params, true);
  case SweepKind::sigma_vs_S_gamma: return sigma_vs_tenants(params, false);
  case SweepKind::rho1_vs_share_bounds: return rho1_bounds(params);
  case SweepKind::sigma_vs_share_equality: return sigma_vs_equality(params);
  case SweepKind::het_profile: return het_profile(params);
  }
  throw ValidationError("sweep: unknown kind");
}

} // namespace slicegame
