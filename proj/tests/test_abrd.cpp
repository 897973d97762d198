#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "slicegame/abrd.hpp"
#include "slicegame/sweeps.hpp"
#include "test_support.hpp"

using namespace slicegame;
using namespace slicegame::testing;

namespace {

Scenario homogeneous(std::vector<int> users, double gamma, std::vector<double> shares, double alpha) {
  return Scenario::from_gammas(users, std::vector<double>(users.size(), gamma), std::move(shares), 1.0, alpha);
}

double row_sum(std::span<const double> row) {
  double s = 0.0;
  for (double x : row) s += x;
  return s;
}

// Maximizes tenant revenue over the one-dimensional budget line of a
// two-cell scenario: dense grid, then golden-section refinement.
double grid_best_first_weight(const Scenario &sc, const WeightProfile &w, std::size_t tenant) {
  const double s = sc.shares()[tenant];
  auto revenue = [&](double x) {
    const std::vector<double> row{x, s - x};
    return market_state(sc, w.with_tenant(tenant, row)).revenues[tenant];
  };
  const int n = static_cast<int>(s / 1e-4);
  double best_x = 0.0, best = -1.0;
  for (int k = 1; k < n; ++k) {
    const double x = s * k / n;
    const double v = revenue(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double a = best_x - s / n, b = best_x + s / n;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  while (b - a > 1e-12) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (revenue(c) > revenue(d))
      b = d;
    else
      a = c;
  }
  return 0.5 * (a + b);
}

} // namespace

TEST_CASE("config validation") {
  AbrdConfig c;
  CHECK_NOTHROW(c.validate());
  c.tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = AbrdConfig{};
  c.max_rounds = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = AbrdConfig{};
  c.br_iters = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("best response in a single cell is the whole share") {
  const Scenario sc = homogeneous({100}, 1.0, {0.3, 0.7}, 3.0);
  Matrix m(2, 1);
  m(0, 0) = 0.05;
  m(1, 0) = 0.7;
  for (BestResponseMethod method : {BestResponseMethod::gradient, BestResponseMethod::heuristic}) {
    AbrdConfig c;
    c.br_method = method;
    const BestResponse br = best_response(sc, 0, WeightProfile(m), c);
    REQUIRE(br.weights.size() == 1);
    CHECK(br.weights[0] == 0.3);
  }
}

TEST_CASE("proposed weights are a mutual best response on homogeneous cells") {
  const Scenario sc = homogeneous({100, 300}, 1.3, {0.6, 0.4}, 3.0);
  const EquilibriumResult proposed = proposed_solution(sc);
  for (std::size_t i = 0; i < 2; ++i) {
    const double oracle = grid_best_first_weight(sc, proposed.weights, i);
    CHECK(oracle == doctest::Approx(proposed.weights(i, 0)).epsilon(1e-6));
    const BestResponse br = best_response(sc, i, proposed.weights, AbrdConfig{});
    CHECK(br.converged);
    CHECK(std::abs(br.weights[0] - proposed.weights(i, 0)) < 1e-9);
    CHECK(std::abs(br.weights[0] - oracle) < 1e-6);
  }
}

TEST_CASE("best response matches a grid search on heterogeneous two-cell instances") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const Scenario sc = random_scenario(rng, 3, 2);
    const WeightProfile w = random_profile(rng, sc);
    for (std::size_t i = 0; i < sc.num_tenants(); ++i) {
      const BestResponse br = best_response(sc, i, w, AbrdConfig{});
      const double oracle = grid_best_first_weight(sc, w, i);
      CHECK(std::abs(br.weights[0] - oracle) < 1e-6 * sc.shares()[i] + 1e-9);
    }
  }
}

TEST_CASE("gradient and heuristic best responses agree on revenue") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const Scenario sc = random_scenario(rng, 3, 3);
    const WeightProfile w = random_profile(rng, sc);
    AbrdConfig gradient;
    AbrdConfig heuristic;
    heuristic.br_method = BestResponseMethod::heuristic;
    heuristic.rng_seed = 1000 + rep;
    for (std::size_t i = 0; i < sc.num_tenants(); ++i) {
      const BestResponse a = best_response(sc, i, w, gradient);
      const BestResponse b = best_response(sc, i, w, heuristic);
      CHECK(b.revenue == doctest::Approx(a.revenue).epsilon(1e-6));
    }
  }
}

TEST_CASE("best responses improve revenue, keep the budget and stay interior") {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 40; ++rep) {
    const Scenario sc = random_scenario(rng, 2 + rep % 4, 2 + rep % 6);
    const WeightProfile w = random_profile(rng, sc);
    for (BestResponseMethod method : {BestResponseMethod::gradient, BestResponseMethod::heuristic}) {
      AbrdConfig c;
      c.br_method = method;
      c.br_iters = 100;
      for (std::size_t i = 0; i < sc.num_tenants(); ++i) {
        const BestResponse br = best_response(sc, i, w, c);
        CHECK(br.start_revenue == doctest::Approx(tenant_revenue(sc, w, i)).epsilon(1e-14));
        CHECK(br.revenue >= br.start_revenue - 1e-12);
        CHECK(row_sum(br.weights) == doctest::Approx(sc.shares()[i]).epsilon(1e-14));
        for (double x : br.weights) CHECK(x >= kWeightFloor);
        CHECK(tenant_revenue(sc, w.with_tenant(i, br.weights), i) == doctest::Approx(br.revenue).epsilon(1e-14));
        if (method == BestResponseMethod::gradient) {
          CHECK(br.converged);
          CHECK(br.projected_gradient < 1e-9 * br.multiplier);
        }
      }
    }
  }
}

TEST_CASE("abrd recovers the proposed solution on homogeneous scenarios") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> g(0.25, 4.0), a(0.5, 7.0);
  std::uniform_int_distribution<int> n(50, 500);
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t cells = 2 + rep % 5;
    std::vector<int> users(cells);
    for (int &u : users) u = n(rng);
    const Scenario sc = homogeneous(users, g(rng), random_simplex(rng, 2 + rep % 3, 1.0), a(rng));
    const EquilibriumResult p = proposed_solution(sc);
    const EquilibriumResult r = abrd(sc, AbrdConfig{});
    REQUIRE(r.diagnostics.converged);
    CHECK(r.method == SolveMethod::abrd);
    for (std::size_t i = 0; i < sc.num_tenants(); ++i)
      for (std::size_t j = 0; j < cells; ++j) CHECK(std::abs(r.weights(i, j) - p.weights(i, j)) < 1e-6);

    // outcomes to 1e-8 need the weights a little tighter than the default stop
    AbrdConfig tight;
    tight.tolerance = 1e-10;
    const EquilibriumResult t = abrd(sc, tight);
    REQUIRE(t.diagnostics.converged);
    for (std::size_t j = 0; j < cells; ++j) {
      CHECK(std::abs(t.state.sigma[j] - p.state.sigma[j]) < 1e-8);
      for (std::size_t i = 0; i < sc.num_tenants(); ++i) CHECK(std::abs(t.state.rho(j, i) - p.state.rho(j, i)) < 1e-8);
    }
  }
}

TEST_CASE("abrd keeps budgets binding along the trajectory") {
  std::mt19937_64 rng(45);
  const Scenario sc = random_scenario(rng, 4, 6);
  int calls = 0;
  const EquilibriumResult r = abrd(sc, AbrdConfig{}, [&](int round, std::size_t, const WeightProfile &w) {
    ++calls;
    CHECK(round >= 1);
    CHECK(budget_residual(sc, w) < 1e-15);
    for (double x : w.matrix().data()) CHECK(x >= kWeightFloor);
  });
  CHECK(r.diagnostics.converged);
  CHECK(calls == r.diagnostics.best_response_calls);
  CHECK(r.kkt_residual < 1e-6);
}

TEST_CASE("abrd is deterministic for a fixed seed") {
  std::mt19937_64 rng(46);
  const Scenario sc = random_scenario(rng, 4, 5);
  std::vector<Matrix> first, second;
  const EquilibriumResult a = abrd(sc, AbrdConfig{}, [&](int, std::size_t, const WeightProfile &w) {
    first.push_back(w.matrix());
  });
  const EquilibriumResult b = abrd(sc, AbrdConfig{}, [&](int, std::size_t, const WeightProfile &w) {
    second.push_back(w.matrix());
  });
  CHECK(first == second);
  CHECK(a.weights == b.weights);
  CHECK(a.diagnostics.rounds == b.diagnostics.rounds);

  AbrdConfig h;
  h.br_method = BestResponseMethod::heuristic;
  h.br_iters = 50;
  h.max_rounds = 3;
  CHECK(abrd(sc, h).weights == abrd(sc, h).weights);
}

TEST_CASE("round cap is reported as non-convergence") {
  std::mt19937_64 rng(47);
  const Scenario sc = random_scenario(rng, 3, 4);
  AbrdConfig c;
  c.max_rounds = 1;
  const EquilibriumResult r = abrd(sc, c);
  CHECK_FALSE(r.diagnostics.converged);
  CHECK(r.diagnostics.rounds == 1);
  CHECK(budget_residual(sc, r.weights) < 1e-15);
}

TEST_CASE("converged abrd profile is an epsilon-Nash equilibrium") {
  std::mt19937_64 rng(48);
  for (int rep = 0; rep < 5; ++rep) {
    const Scenario sc = random_scenario(rng, 3, 4);
    const EquilibriumResult r = abrd(sc, AbrdConfig{});
    REQUIRE(r.diagnostics.converged);
    CHECK(epsilon_nash_gap(sc, r.weights, AbrdConfig{}, 900 + rep) < 1e-6);
  }
  // a random profile is not an equilibrium
  const Scenario sc = random_scenario(rng, 3, 4);
  CHECK(epsilon_nash_gap(sc, random_profile(rng, sc), AbrdConfig{}, 7) > 1e-4);
}

TEST_CASE("heterogeneous scenario: large tenant shifts weight toward high-capacity cells") {
  const SweepParams params;
  for (double s1 : {0.4, 0.55, 0.7}) {
    const Scenario sc = heterogeneous_scenario(params, s1);
    const EquilibriumResult p = proposed_solution(sc);
    const EquilibriumResult r = abrd(sc, AbrdConfig{});
    REQUIRE(r.diagnostics.converged);
    for (std::size_t j : {0, 1}) {
      CHECK(r.weights(0, j) < p.weights(0, j));
      CHECK(r.state.rho(j, 0) < p.state.rho(j, 0));
    }
    for (std::size_t j : {3, 4}) {
      CHECK(r.weights(0, j) > p.weights(0, j));
      CHECK(r.state.rho(j, 0) > p.state.rho(j, 0));
    }
  }
}
