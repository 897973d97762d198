#pragma once

// Shared generators and finite-difference oracles for the unit tests. The
// oracles only use market_state() revenues, never the closed-form derivatives.

#include <random>
#include <vector>

#include "slicegame/model.hpp"

namespace slicegame::testing {

inline std::vector<double> random_simplex(std::mt19937_64 &rng, std::size_t n, double total) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (double &x : v) sum += (x = expo(rng));
  for (double &x : v) x *= total / sum;
  return v;
}

inline Scenario random_scenario(std::mt19937_64 &rng, std::size_t tenants, std::size_t cells,
                                double gamma_lo = 0.25, double gamma_hi = 4.0, double alpha_lo = 0.5,
                                double alpha_hi = 7.0) {
  std::uniform_real_distribution<double> g(gamma_lo, gamma_hi), a(alpha_lo, alpha_hi);
  std::uniform_int_distribution<int> n(50, 500);
  std::vector<int> users(cells);
  std::vector<double> gammas(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    users[j] = n(rng);
    gammas[j] = g(rng);
  }
  std::vector<double> shares = random_simplex(rng, tenants, 1.0);
  for (double &s : shares) s = 0.05 + 0.95 * s; // keep shares away from zero
  double sum = 0.0;
  for (double s : shares) sum += s;
  for (double &s : shares) s /= sum;
  return Scenario::from_gammas(users, gammas, shares, 1.0, a(rng));
}

/// Feasible profile with every row summing to its share (entries >= 1% of it).
inline WeightProfile random_profile(std::mt19937_64 &rng, const Scenario &sc) {
  Matrix m(sc.num_tenants(), sc.num_cells());
  for (std::size_t i = 0; i < sc.num_tenants(); ++i) {
    std::vector<double> row = random_simplex(rng, sc.num_cells(), 1.0);
    const double floor = 0.01 / static_cast<double>(sc.num_cells());
    double sum = 0.0;
    for (double &x : row) sum += (x = floor + x);
    for (std::size_t j = 0; j < sc.num_cells(); ++j) m(i, j) = row[j] / sum * sc.shares()[i];
  }
  return WeightProfile(std::move(m));
}

inline double revenue_at(const Scenario &sc, const WeightProfile &w, std::size_t tenant, std::size_t cell,
                         double delta) {
  Matrix m = w.matrix();
  m(tenant, cell) += delta;
  return market_state(sc, WeightProfile(std::move(m))).revenues[tenant];
}

inline double fd_first(const Scenario &sc, const WeightProfile &w, std::size_t tenant, std::size_t cell,
                       double h) {
  return (revenue_at(sc, w, tenant, cell, h) - revenue_at(sc, w, tenant, cell, -h)) / (2.0 * h);
}

/// Second derivative by Richardson-extrapolated central differences.
inline double fd_second(const Scenario &sc, const WeightProfile &w, std::size_t tenant, std::size_t cell,
                        double h) {
  const double f0 = revenue_at(sc, w, tenant, cell, 0.0);
  auto d2 = [&](double s) {
    return (revenue_at(sc, w, tenant, cell, s) - 2.0 * f0 + revenue_at(sc, w, tenant, cell, -s)) / (s * s);
  };
  return (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
}

/// Mixed partial by a four-point stencil, differenced cell by cell so that
/// terms untouched by either perturbation cancel without rounding.
inline double fd_cross(const Scenario &sc, const WeightProfile &w, std::size_t tenant, std::size_t j,
                       std::size_t k, double h) {
  auto at = [&](double dj, double dk) {
    Matrix m = w.matrix();
    m(tenant, j) += dj;
    m(tenant, k) += dk;
    return market_state(sc, WeightProfile(std::move(m))).subscribers;
  };
  const Matrix a = at(h, h), b = at(h, -h), c = at(-h, h), d = at(-h, -h);
  long double total = 0.0L;
  for (std::size_t cell = 0; cell < sc.num_cells(); ++cell)
    total += ((long double)a(cell, tenant) - b(cell, tenant)) - ((long double)c(cell, tenant) - d(cell, tenant));
  return sc.price() * static_cast<double>(total) / (4.0 * h * h);
}

} // namespace slicegame::testing
