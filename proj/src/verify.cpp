#include "slicegame/verify.hpp"

#include <algorithm>
#include <cmath>

#include "slicegame/equilibrium.hpp"

namespace slicegame {

namespace {

double revenue_shifted(const Scenario &sc, const WeightProfile &w, std::size_t i, std::size_t j, double d) {
  Matrix m = w.matrix();
  m(i, j) += d;
  return market_state(sc, WeightProfile(std::move(m))).revenues[i];
}

CheckResult check(std::string name, double value, double threshold) {
  return {std::move(name), value < threshold, value, threshold};
}

} // namespace

std::vector<CheckResult> verify_scenario(const Scenario &sc, const AbrdConfig &config) {
  std::vector<CheckResult> out;
  const EquilibriumResult prop = proposed_solution(sc);
  const WeightProfile &w = prop.weights;
  const double beta = sc.beta();

  double root_res = 0.0;
  for (std::size_t j = 0; j < sc.num_cells(); ++j) {
    const double gamma = sc.gammas()[j];
    if (std::isinf(gamma)) continue;
    const std::vector<double> cw = w.cell(j);
    const double a = std::pow(gamma, beta) * weight_concentration(cw, beta);
    root_res = std::max(root_res, std::abs(penetration_residual(subscription_root(cw, gamma, beta), a, beta)));
  }
  out.push_back(check("penetration_root_residual", root_res, 1e-10));

  double cap = 0.0, logit = 0.0;
  const MarketState &st = prop.state;
  for (std::size_t j = 0; j < sc.num_cells(); ++j) {
    const CellSpec &cell = sc.cells()[j];
    double alloc = 0.0, denom = std::pow(sc.price() * cell.r0, sc.alpha());
    for (std::size_t i = 0; i < sc.num_tenants(); ++i) {
      alloc += st.allocation(j, i);
      denom += std::pow(st.per_user_resources(j, i), sc.alpha());
    }
    cap = std::max(cap, std::abs(alloc - cell.capacity) / cell.capacity);
    for (std::size_t i = 0; i < sc.num_tenants(); ++i) {
      const double share = std::pow(st.per_user_resources(j, i), sc.alpha()) / denom;
      logit = std::max(logit, std::abs(st.subscribers(j, i) / cell.n_users - share) / share);
    }
  }
  out.push_back(check("capacity_conservation", cap, 1e-12));
  out.push_back(check("logit_fixed_point", logit, 1e-9));

  double grad_err = 0.0, hess_err = 0.0;
  for (std::size_t i = 0; i < sc.num_tenants(); ++i) {
    const std::vector<double> g = revenue_gradient(sc, w, i);
    const TenantHessian h = revenue_hessian_diag(sc, w, i);
    const double f0 = prop.state.revenues[i];
    for (std::size_t j = 0; j < sc.num_cells(); ++j) {
      const double step = std::min(1e-6, 1e-3 * w(i, j));
      const double fd = (revenue_shifted(sc, w, i, j, step) - revenue_shifted(sc, w, i, j, -step)) / (2.0 * step);
      grad_err = std::max(grad_err, std::abs(g[j] - fd) / std::abs(fd));
      const double s = 1e-2 * w(i, j);
      auto d2 = [&](double e) {
        return (revenue_shifted(sc, w, i, j, e) - 2.0 * f0 + revenue_shifted(sc, w, i, j, -e)) / (e * e);
      };
      const double fd2 = (4.0 * d2(s / 2.0) - d2(s)) / 3.0;
      hess_err = std::max(hess_err, std::abs(h.diagonal[j] - fd2) / std::abs(fd2));
    }
  }
  out.push_back(check("gradient_finite_difference", grad_err, 1e-5));
  out.push_back(check("hessian_finite_difference", hess_err, 1e-4));

  if (homogeneity_check(sc)) {
    out.push_back(check("kkt_residual_proposed", prop.kkt_residual, 1e-8));
  } else {
    const EquilibriumResult eq = abrd(sc, config);
    out.push_back(check("abrd_converged", eq.diagnostics.converged ? 0.0 : 1.0, 0.5));
    out.push_back(check("kkt_residual_abrd", eq.kkt_residual, 1e-6));
  }
  return out;
}

} // namespace slicegame
