#include "slicegame/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace slicegame {

RootResult safeguarded_newton(const std::function<void(double, double &, double &)> &fdf,
                              double lo, double hi, const RootOptions &options) {
  double flo = 0.0, fhi = 0.0, d = 0.0;
  fdf(lo, flo, d);
  fdf(hi, fhi, d);
  if (flo == 0.0) return {lo, 0, true};
  if (fhi == 0.0) return {hi, 0, true};
  if ((flo > 0.0) == (fhi > 0.0))
    throw ConvergenceError("safeguarded_newton: root is not bracketed");
  // orient so that f(xl) < 0 < f(xh)
  double xl = lo, xh = hi;
  if (flo > 0.0) std::swap(xl, xh);

  double x = 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  double f = 0.0, df = 0.0;
  fdf(x, f, df);

  for (int it = 1; it <= options.max_iterations; ++it) {
    if (f == 0.0) return {x, it, true};
    const bool newton_out = ((x - xh) * df - f) * ((x - xl) * df - f) >= 0.0;
    const bool newton_slow = std::abs(2.0 * f) > std::abs(dx_old * df);
    if (newton_out || newton_slow || df == 0.0) {
      dx_old = dx;
      dx = 0.5 * (xh - xl);
      x = xl + dx;
    } else {
      dx_old = dx;
      dx = f / df;
      x -= dx;
    }
    if (x == xl || x == xh) {
      // Newton landed on the bracket; bisect instead
      dx = 0.5 * (xh - xl);
      x = xl + dx;
      if (x == xl || x == xh) return {x, it, true}; // adjacent doubles
    }
    const double tol = options.abs_tolerance + options.rel_tolerance * std::abs(x);
    if (std::abs(dx) <= tol || std::abs(xh - xl) <= tol) return {x, it, true};
    fdf(x, f, df);
    if (f < 0.0)
      xl = x;
    else
      xh = x;
  }
  return {x, options.max_iterations, false};
}

RootResult bisect(const std::function<double(double)> &f, double lo, double hi,
                  double tolerance, int max_iterations) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, 0, true};
  if (fhi == 0.0) return {hi, 0, true};
  if ((flo > 0.0) == (fhi > 0.0))
    throw ConvergenceError("bisect: root is not bracketed");
  for (int it = 1; it <= max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= tolerance * std::max(1.0, std::abs(mid)))
      return {mid, it, true};
    const double fm = f(mid);
    if (fm == 0.0) return {mid, it, true};
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), max_iterations, false};
}

namespace {

// Relative tolerance only: the root may sit many orders of magnitude below
// one (tiny normalized capacity, or the complement when nearly everyone
// subscribes), where an absolute tolerance would be meaningless.
constexpr RootOptions kPenetrationOptions{0.0, 4.0 * std::numeric_limits<double>::epsilon(), 200};

} // namespace

PenetrationRoot solve_penetration(double scale, double beta) {
  if (std::isinf(scale)) return {1.0, 0.0, 0};
  if (!(scale > 0.0) || !(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("solve_penetration: need scale > 0 and 0 < beta < 1");

  const double e = 1.0 - beta;
  // f(sigma) = sigma - a (1 - sigma)^e is increasing, f(0) < 0 < f(1).
  const double f_half = 0.5 - scale * std::pow(0.5, e);
  if (f_half >= 0.0) {
    auto fdf = [&](double s, double &f, double &df) {
      const double u = 1.0 - s;
      const double pu = std::pow(u, e);
      f = s - scale * pu;
      df = 1.0 + scale * e * pu / u;
    };
    const RootResult r = safeguarded_newton(fdf, 0.0, 0.5, kPenetrationOptions);
    if (!r.converged) throw ConvergenceError("solve_penetration: iteration cap reached");
    return {r.root, 1.0 - r.root, r.iterations};
  }
  // Root in (1/2, 1): with t = log(1 - sigma), h(t) = log(1 - e^t) - log a - e t
  // is decreasing and close to linear, so Newton is fast even when the
  // complement is hundreds of orders of magnitude below one.
  const double log_a = std::log(scale);
  const double t_floor = std::log(std::numeric_limits<double>::denorm_min());
  double t_lo = std::max((std::log(0.5) - log_a) / e, t_floor);
  const double t_hi = std::min(std::log(0.5), -log_a / e);
  auto hdh = [&](double t, double &h, double &dh) {
    const double et = std::exp(t);
    h = std::log1p(-et) - log_a - e * t;
    dh = -et / (1.0 - et) - e;
  };
  double h_lo = 0.0, dummy = 0.0;
  hdh(t_lo, h_lo, dummy);
  if (h_lo <= 0.0) return {1.0, 0.0, 0}; // complement underflows
  double h_hi = 0.0;
  hdh(t_hi, h_hi, dummy);
  // h(t_hi) is zero up to rounding when the complement is tiny
  if (t_hi <= t_lo || h_hi >= 0.0) return {1.0 - std::exp(t_hi), std::exp(t_hi), 0};
  const RootResult r = safeguarded_newton(hdh, t_lo, t_hi, {4.0 * std::numeric_limits<double>::epsilon(), 0.0, 200});
  if (!r.converged) throw ConvergenceError("solve_penetration: iteration cap reached");
  const double u = std::exp(r.root);
  return {1.0 - u, u, r.iterations};
}

double penetration_residual(const PenetrationRoot &root, double scale, double beta) {
  if (std::isinf(scale)) return root.complement == 0.0 ? 0.0 : 1.0;
  const double e = 1.0 - beta;
  if (root.sigma <= 0.5) return root.sigma - scale * std::pow(1.0 - root.sigma, e);
  return (1.0 - root.complement) - scale * std::pow(root.complement, e);
}

} // namespace slicegame
