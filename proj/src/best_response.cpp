#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "slicegame/abrd.hpp"

namespace slicegame {

void AbrdConfig::validate() const {
  if (!(tolerance > 0.0)) throw ValidationError("abrd config: tolerance must be > 0");
  if (max_rounds < 1) throw ValidationError("abrd config: max_rounds must be >= 1");
  if (br_iters < 1) throw ValidationError("abrd config: br_iters must be >= 1");
  if (cuckoo.population < 2) throw ValidationError("abrd config: cuckoo population must be >= 2");
  if (!(cuckoo.discovery_probability >= 0.0 && cuckoo.discovery_probability <= 1.0))
    throw ValidationError("abrd config: discovery probability must lie in [0, 1]");
  if (!(cuckoo.levy_exponent > 0.0 && cuckoo.levy_exponent <= 2.0))
    throw ValidationError("abrd config: Levy exponent must lie in (0, 2]");
}

namespace {

constexpr double kStationarity = 1e-9; // relative projected-gradient target
constexpr double kPolish = 1e-14;     // keep taking Newton steps down to this
constexpr double kArmijo = 1e-4;

// The revenue of one tenant, decomposed by cell with the other tenants frozen.
class TenantProblem {
public:
  TenantProblem(const Scenario &scenario, const WeightProfile &profile, std::size_t tenant)
      : price_(scenario.price()), beta_(scenario.beta()), share_(scenario.shares()[tenant]) {
    for (std::size_t j = 0; j < scenario.num_cells(); ++j)
      ctx_.push_back(cell_context(scenario, profile, tenant, j));
  }

  std::size_t cells() const { return ctx_.size(); }
  double share() const { return share_; }

  double revenue(const std::vector<double> &w) const {
    double total = 0.0;
    for (std::size_t j = 0; j < ctx_.size(); ++j) total += tenant_cell_terms(ctx_[j], w[j], beta_).subscribers;
    return price_ * total;
  }

  void derivatives(const std::vector<double> &w, std::vector<double> &g, std::vector<double> &h) const {
    for (std::size_t j = 0; j < ctx_.size(); ++j) {
      const TenantCellTerms t = tenant_cell_terms(ctx_[j], w[j], beta_);
      g[j] = revenue_derivative(t, ctx_[j].n_users, price_, beta_);
      h[j] = revenue_second_derivative(t, ctx_[j].n_users, price_, beta_);
    }
  }

  // Puts w back on the budget hyperplane: every entry at least the floor,
  // the largest entry absorbing whatever the others leave.
  void restore_budget(std::vector<double> &w) const {
    for (double &x : w) x = std::max(x, kWeightFloor);
    const std::size_t k = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    double others = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (j != k) others += w[j];
    w[k] = share_ - others;
    if (w[k] < kWeightFloor) {
      // rescale the whole row onto the budget
      for (double &x : w) x = std::max(x, kWeightFloor);
      const double sum = std::accumulate(w.begin(), w.end(), 0.0);
      for (double &x : w) x *= share_ / sum;
    }
  }

private:
  double price_;
  double beta_;
  double share_;
  std::vector<CellContext> ctx_;
};

double projected_norm(const std::vector<double> &g, double &mu);

void fill_stationarity(const TenantProblem &prob, BestResponse &br) {
  std::vector<double> g(prob.cells()), h(prob.cells());
  prob.derivatives(br.weights, g, h);
  br.projected_gradient = projected_norm(g, br.multiplier);
}

double projected_norm(const std::vector<double> &g, double &mu) {
  mu = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
  double pg = 0.0;
  for (double gj : g) pg = std::max(pg, std::abs(gj - mu));
  return pg;
}

// Diagonally scaled projected ascent on the budget hyperplane. The scaling is
// the inverse of the (negated) diagonal Hessian where that is positive
// definite, which makes the step an exact Newton step on the equality
// constrained problem; elsewhere w_j / g_j keeps the step scale-free.
//
// Close to the optimum the revenue gain of a step drops below what a double
// can resolve, so there the line search accepts steps that shrink the
// projected gradient without losing revenue beyond rounding.
BestResponse gradient_best_response(const TenantProblem &prob, std::vector<double> w, int max_iters) {
  const std::size_t m = prob.cells();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  prob.restore_budget(w);
  const std::vector<double> start = w;
  const double start_revenue = prob.revenue(w);
  double revenue = start_revenue;

  BestResponse br;
  std::vector<double> g(m), h(m), scale(m), dir(m), trial(m), gt(m), ht(m);
  double last_pg = std::numeric_limits<double>::infinity();
  prob.derivatives(w, g, h);
  double mu = 0.0;
  double pg = projected_norm(g, mu);
  for (int it = 0; it < max_iters; ++it) {
    br.iterations = it;
    // Past the target, continue only while the steps still pay off.
    if (pg < kStationarity * mu && (pg < kPolish * mu || pg > 0.5 * last_pg)) break;
    last_pg = pg;

    for (std::size_t j = 0; j < m; ++j) scale[j] = h[j] < 0.0 ? -1.0 / h[j] : w[j] / g[j];
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      num += g[j] * scale[j];
      den += scale[j];
    }
    const double lambda = num / den;
    double slope = 0.0;
    double t = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      dir[j] = scale[j] * (g[j] - lambda);
      slope += g[j] * dir[j];
      if (dir[j] < 0.0) t = std::min(t, 0.9 * (w[j] - kWeightFloor) / -dir[j]);
    }
    const double noise = 2.0 * eps * std::abs(revenue);
    bool moved = false;
    for (int ls = 0; ls < 60 && t > 0.0; ++ls, t *= 0.5) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = w[j] + t * dir[j];
      prob.restore_budget(trial);
      const double rev = prob.revenue(trial);
      bool accept = false;
      if (t * slope > noise) {
        accept = rev >= revenue + kArmijo * t * slope;
      } else if (rev >= revenue - noise) {
        prob.derivatives(trial, gt, ht);
        double mu_t = 0.0;
        accept = projected_norm(gt, mu_t) < pg;
      }
      if (accept) {
        w = trial;
        revenue = rev;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    br.iterations = it + 1;
    prob.derivatives(w, g, h);
    pg = projected_norm(g, mu);
  }
  if (revenue < start_revenue - 1e-12) {
    w = start;
    revenue = start_revenue;
  }
  br.weights = w;
  br.revenue = revenue;
  prob.derivatives(w, g, h);
  br.converged = projected_norm(g, mu) < kStationarity * mu;
  return br;
}

BestResponse heuristic_best_response(const TenantProblem &prob, std::vector<double> start,
                                     const AbrdConfig &config, std::uint64_t seed) {
  const std::size_t m = prob.cells();
  const double s = prob.share();
  prob.restore_budget(start);

  // Free variables are the first m - 1 weights; the last one is the residual.
  auto expand = [&](const std::vector<double> &free) {
    std::vector<double> w(free);
    double used = std::accumulate(free.begin(), free.end(), 0.0);
    w.push_back(s - used);
    return w;
  };
  auto repair = [&](std::vector<double> &free) {
    for (double &x : free) x = std::clamp(x, kWeightFloor, s);
    const double used = std::accumulate(free.begin(), free.end(), 0.0);
    const double room = s - kWeightFloor;
    if (used > room)
      for (double &x : free) x = std::max(kWeightFloor, x * room / used);
  };
  auto objective = [&](const std::vector<double> &free) { return prob.revenue(expand(free)); };
  auto sample = [&](std::uint64_t &draw) {
    // uniform point on the budget simplex
    std::mt19937_64 local(draw);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> e(m);
    double total = 0.0;
    for (double &x : e) total += (x = expo(local));
    std::vector<double> free(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) free[j] = s * e[j] / total;
    return free;
  };

  BestResponse br;
  const std::vector<double> seed_point(start.begin(), start.end() - 1);
  const CuckooResult cs = cuckoo_maximize(objective, repair, sample, {seed_point}, config.br_iters,
                                          config.cuckoo, seed);
  br.weights = expand(cs.best);
  br.revenue = cs.best_value;
  br.iterations = cs.generations;
  br.converged = true;
  return br;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

} // namespace

BestResponse best_response(const Scenario &scenario, std::size_t tenant, const WeightProfile &profile,
                           const AbrdConfig &config, std::uint64_t stream) {
  if (tenant >= scenario.num_tenants()) throw ValidationError("best_response: tenant index out of range");
  const TenantProblem prob(scenario, profile, tenant);
  const auto row = profile.tenant(tenant);
  std::vector<double> start(row.begin(), row.end());
  const double start_revenue = tenant_revenue(scenario, profile, tenant);

  BestResponse br;
  if (prob.cells() == 1) {
    br.weights = {prob.share()};
    br.revenue = prob.revenue(br.weights);
    br.converged = true;
  } else if (config.br_method == BestResponseMethod::gradient) {
    br = gradient_best_response(prob, std::move(start), config.br_iters);
  } else {
    br = heuristic_best_response(prob, std::move(start), config, mix_seed(config.rng_seed, stream));
  }
  br.start_revenue = start_revenue;
  fill_stationarity(prob, br);
  return br;
}

double epsilon_nash_gap(const Scenario &scenario, const WeightProfile &profile, const AbrdConfig &config,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < scenario.num_tenants(); ++i) {
    const double current = tenant_revenue(scenario, profile, i);
    std::vector<double> start(scenario.num_cells());
    double total = 0.0;
    for (double &x : start) total += (x = expo(rng));
    for (double &x : start) x *= scenario.shares()[i] / total;
    const BestResponse br = best_response(scenario, i, profile.with_tenant(i, start), config, rng());
    worst = std::max(worst, (br.revenue - current) / current);
  }
  return worst;
}

} // namespace slicegame
