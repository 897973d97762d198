#pragma once

#include <functional>
#include <stdexcept>

namespace slicegame {

class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct RootOptions {
  double abs_tolerance = 1e-12;
  double rel_tolerance = 4e-16;
  int max_iterations = 200;
};

/// Newton's method kept inside a shrinking bracket [lo, hi]; falls back to
/// bisection whenever the Newton step leaves the bracket or fails to halve
/// the previous step. `fdf` fills f(x) and f'(x). Requires f(lo), f(hi) of
/// opposite sign (either may be zero).
RootResult safeguarded_newton(const std::function<void(double, double &, double &)> &fdf,
                              double lo, double hi, const RootOptions &options = {});

/// Plain bisection, used as an independent reference in tests.
RootResult bisect(const std::function<double(double)> &f, double lo, double hi,
                  double tolerance = 1e-15, int max_iterations = 2000);

/// Root of the subscription equation  s - a (1 - s)^(1 - beta) = 0  on (0, 1).
///
/// Both the root and its complement are returned because either may be the
/// small, well-conditioned quantity: near s = 1 the complement carries the
/// precision that `1 - complement` loses to rounding.
struct PenetrationRoot {
  double sigma = 0.0;
  double complement = 1.0; // 1 - sigma, computed directly
  int iterations = 0;
};

/// `scale` is a > 0 and 0 < beta < 1. a = +inf yields sigma = 1 exactly.
PenetrationRoot solve_penetration(double scale, double beta);

/// Residual of the subscription equation evaluated in whichever of
/// sigma / complement is smaller, so that it stays meaningful near sigma = 1.
double penetration_residual(const PenetrationRoot &root, double scale, double beta);

} // namespace slicegame
