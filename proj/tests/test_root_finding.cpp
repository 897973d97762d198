#include <doctest.h>

#include <cmath>
#include <limits>

#include "slicegame/root_finding.hpp"

using namespace slicegame;

namespace {

// sigma - a (1 - sigma)^(1 - beta), evaluated directly
double penetration_eq(double sigma, double a, double beta) { return sigma - a * std::pow(1.0 - sigma, 1.0 - beta); }

} // namespace

TEST_CASE("safeguarded newton finds a bracketed root") {
  auto fdf = [](double x, double &f, double &df) {
    f = x * x * x - 2.0;
    df = 3.0 * x * x;
  };
  const RootResult r = safeguarded_newton(fdf, 0.0, 3.0);
  CHECK(r.converged);
  CHECK(r.root == doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));
}

TEST_CASE("safeguarded newton rejects an unbracketed interval") {
  auto fdf = [](double x, double &f, double &df) {
    f = x * x + 1.0;
    df = 2.0 * x;
  };
  CHECK_THROWS_AS(safeguarded_newton(fdf, -1.0, 1.0), ConvergenceError);
}

TEST_CASE("safeguarded newton survives a flat-derivative start") {
  // Newton from the midpoint would jump far outside the bracket.
  auto fdf = [](double x, double &f, double &df) {
    f = std::atan(x - 0.3);
    df = 1.0 / (1.0 + (x - 0.3) * (x - 0.3));
  };
  const RootResult r = safeguarded_newton(fdf, -50.0, 10.0);
  CHECK(r.converged);
  CHECK(r.root == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("penetration root: two equal weights, gamma 1, beta 0.75") {
  // sigma = 2^0.25 (1 - sigma)^0.25; 40-digit bisection gives
  // 0.79762310979451585294...
  const double a = std::pow(2.0, 0.25);
  const PenetrationRoot r = solve_penetration(a, 0.75);
  CHECK(r.sigma == doctest::Approx(0.7976231097945159).epsilon(1e-14));

  // and the in-test bisection oracle agrees
  const RootResult ref = bisect([&](double s) { return penetration_eq(s, a, 0.75); }, 0.0, 1.0);
  CHECK(std::abs(r.sigma - ref.root) < 1e-13);
  CHECK(std::abs(penetration_residual(r, a, 0.75)) < 1e-14);
}

TEST_CASE("penetration root: infinite scale means everybody subscribes") {
  const PenetrationRoot r = solve_penetration(std::numeric_limits<double>::infinity(), 0.5);
  CHECK(r.sigma == 1.0);
  CHECK(r.complement == 0.0);
}

TEST_CASE("penetration root: residual stays small across regimes") {
  for (double beta : {0.05, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    for (double a = 1e-8; a < 1e8; a *= 3.7) {
      // complement ~ a^(-1/(1-beta)) underflows past this point
      if (std::log(a) / (1.0 - beta) > 600.0) continue;
      const PenetrationRoot r = solve_penetration(a, beta);
      CAPTURE(beta);
      CAPTURE(a);
      CHECK(r.sigma > 0.0);
      CHECK(r.sigma <= 1.0);
      CHECK(std::abs(penetration_residual(r, a, beta)) < 1e-10);
      CHECK(r.sigma + r.complement == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("penetration root: argument validation") {
  CHECK_THROWS_AS(solve_penetration(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(solve_penetration(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_penetration(1.0, 0.0), std::invalid_argument);
}
