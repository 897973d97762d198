#include "slicegame/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>

#include "slicegame/equilibrium.hpp"

namespace slicegame {

void ScenarioFamily::validate() const {
  if (num_tenants < 1) throw ValidationError("family: num_tenants must be >= 1");
  if (num_cells < 1) throw ValidationError("family: num_cells must be >= 1");
  if (!(alpha > 0.0)) throw ValidationError("family: alpha must be > 0");
  if (!(gamma_min >= 0.0) || !(gamma_max >= gamma_min))
    throw ValidationError("family: need 0 <= gamma_min <= gamma_max");
  if (replications < 1) throw ValidationError("family: replications must be >= 1");
  if (!(min_share >= 0.0) || min_share * num_tenants > 1.0 + 1e-12)
    throw ValidationError("family: min_share must lie in [0, 1/num_tenants]");
  if (users_per_cell < 1) throw ValidationError("family: users_per_cell must be >= 1");
  if (!(price > 0.0)) throw ValidationError("family: price must be > 0");
}

std::uint64_t replication_seed(std::uint64_t family_seed, std::size_t index) {
  const std::uint64_t idx = index;
  std::seed_seq seq{static_cast<std::uint32_t>(family_seed), static_cast<std::uint32_t>(family_seed >> 32),
                    static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  return rng();
}

Scenario gen_scenario(const ScenarioFamily &family, std::size_t index) {
  family.validate();
  std::mt19937_64 rng(replication_seed(family.rng_seed, index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> gammas(static_cast<std::size_t>(family.num_cells));
  for (double &g : gammas) {
    g = family.gamma_min + (family.gamma_max - family.gamma_min) * unit(rng);
    g = std::max(g, 1e-9);
  }
  // Uniform point of the simplex shrunk to s_i >= min_share: a flat
  // Dirichlet draw mapped affinely onto it.
  const std::size_t S = static_cast<std::size_t>(family.num_tenants);
  std::vector<double> e(S);
  double total = 0.0;
  for (double &x : e) {
    x = -std::log1p(-unit(rng));
    total += x;
  }
  const double free_mass = 1.0 - family.min_share * static_cast<double>(S);
  std::vector<double> shares(S);
  double sum = 0.0;
  for (std::size_t i = 0; i < S; ++i) {
    shares[i] = family.min_share + free_mass * e[i] / total;
    sum += shares[i];
  }
  for (double &s : shares) s /= sum;

  const std::vector<int> users(static_cast<std::size_t>(family.num_cells), family.users_per_cell);
  return Scenario::from_gammas(users, gammas, std::move(shares), family.price, family.alpha);
}

ReplicationOutcome run_replication(const ScenarioFamily &family, const AbrdConfig &abrd_config,
                                   std::size_t index) {
  const Scenario scenario = gen_scenario(family, index);
  const EquilibriumResult proposed = proposed_solution(scenario);
  const EquilibriumResult eq = abrd(scenario, abrd_config);

  ReplicationOutcome out;
  out.index = index;
  out.converged = eq.diagnostics.converged;
  out.abrd_rounds = eq.diagnostics.rounds;
  const std::vector<double> rho_tilde = proposed_fractions(scenario.shares(), scenario.beta());
  out.eps_rho = Matrix(scenario.num_cells(), scenario.num_tenants());
  out.eps_sigma.resize(scenario.num_cells());
  for (std::size_t j = 0; j < scenario.num_cells(); ++j) {
    const double s_abrd = eq.state.sigma[j];
    out.eps_sigma[j] = (proposed.state.sigma[j] - s_abrd) / s_abrd;
    for (std::size_t i = 0; i < scenario.num_tenants(); ++i) {
      const double r_abrd = eq.state.rho(j, i);
      out.eps_rho(j, i) = (rho_tilde[i] - r_abrd) / r_abrd;
    }
  }
  return out;
}

double nearest_rank_percentile(std::vector<double> sample, double p) {
  if (sample.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in (0, 100]");
  std::sort(sample.begin(), sample.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sample.size())));
  return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

std::vector<HistogramBin> histogram(std::span<const double> sample, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("histogram: bin width must be > 0");
  if (sample.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  const auto first = static_cast<long long>(std::floor(*lo_it / width));
  const auto last = static_cast<long long>(std::floor(*hi_it / width));
  std::vector<HistogramBin> bins(static_cast<std::size_t>(last - first + 1));
  for (std::size_t b = 0; b < bins.size(); ++b) {
    bins[b].left = static_cast<double>(first + static_cast<long long>(b)) * width;
    bins[b].right = bins[b].left + width;
  }
  for (double v : sample) {
    const auto k = static_cast<long long>(std::floor(v / width)) - first;
    ++bins[static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(bins.size()) - 1))].count;
  }
  return bins;
}

bool operator==(const HistogramBin &a, const HistogramBin &b) {
  return a.left == b.left && a.right == b.right && a.count == b.count;
}

bool operator==(const Percentiles &a, const Percentiles &b) {
  // NaN-safe: an empty sample yields NaN in both reports
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return same(a.p90, b.p90) && same(a.p95, b.p95);
}

DeviationReport assemble_report(std::span<const ReplicationOutcome> outcomes, const HistogramWidths &widths) {
  DeviationReport rep;
  rep.replications = outcomes.size();
  for (const ReplicationOutcome &o : outcomes) {
    if (!o.converged) {
      ++rep.failed_replications;
      rep.failed_indices.push_back(o.index);
      continue;
    }
    if (rep.eps_rho_by_tenant.size() < o.eps_rho.cols()) rep.eps_rho_by_tenant.resize(o.eps_rho.cols());
    for (std::size_t j = 0; j < o.eps_rho.rows(); ++j) {
      rep.eps_sigma.push_back(o.eps_sigma[j]);
      for (std::size_t i = 0; i < o.eps_rho.cols(); ++i) {
        rep.eps_rho.push_back(o.eps_rho(j, i));
        rep.eps_rho_by_tenant[i].push_back(o.eps_rho(j, i));
      }
    }
  }
  auto abs_of = [](const std::vector<double> &v) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    return a;
  };
  const std::vector<double> rho_abs = abs_of(rep.eps_rho);
  const std::vector<double> sigma_abs = abs_of(rep.eps_sigma);
  rep.rho_abs = {nearest_rank_percentile(rho_abs, 90.0), nearest_rank_percentile(rho_abs, 95.0)};
  rep.sigma_abs = {nearest_rank_percentile(sigma_abs, 90.0), nearest_rank_percentile(sigma_abs, 95.0)};

  auto percent = [](const std::vector<double> &v) {
    std::vector<double> out(v);
    for (double &x : out) x *= 100.0;
    return out;
  };
  rep.rho_histogram = histogram(percent(rep.eps_rho), widths.rho_percent);
  rep.sigma_histogram = histogram(percent(rep.eps_sigma), widths.sigma_percent);
  return rep;
}

DeviationReport deviation_study_serial(const ScenarioFamily &family, const AbrdConfig &abrd_config,
                                       const HistogramWidths &widths) {
  family.validate();
  abrd_config.validate();
  std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(family.replications));
  for (std::size_t r = 0; r < outcomes.size(); ++r) outcomes[r] = run_replication(family, abrd_config, r);
  return assemble_report(outcomes, widths);
}

DeviationReport deviation_study(const ScenarioFamily &family, const AbrdConfig &abrd_config,
                                const HistogramWidths &widths) {
  family.validate();
  abrd_config.validate();
  const long long n = family.replications;
  std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(n));
  // Exceptions must not escape an OpenMP region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long r = 0; r < n; ++r) {
    try {
      outcomes[static_cast<std::size_t>(r)] = run_replication(family, abrd_config, static_cast<std::size_t>(r));
    } catch (...) {
#pragma omp critical(slicegame_deviation_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble_report(outcomes, widths);
}

} // namespace slicegame
