#include "slicegame/cuckoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace slicegame {

namespace {

// sigma_u for Mantegna's algorithm.
double mantegna_sigma(double lambda) {
  const double num = std::tgamma(1.0 + lambda) * std::sin(std::numbers::pi * lambda / 2.0);
  const double den = std::tgamma((1.0 + lambda) / 2.0) * lambda * std::pow(2.0, (lambda - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / lambda);
}

} // namespace

CuckooResult cuckoo_maximize(const std::function<double(const std::vector<double> &)> &objective,
                             const std::function<void(std::vector<double> &)> &repair,
                             const std::function<std::vector<double>(std::uint64_t &)> &sample,
                             const std::vector<std::vector<double>> &seeds, int generations,
                             const CuckooParams &params, std::uint64_t rng_seed) {
  if (params.population < 2) throw std::invalid_argument("cuckoo: population must be >= 2");
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sigma_u = mantegna_sigma(params.levy_exponent);

  CuckooResult res;
  std::vector<std::vector<double>> nests;
  for (const auto &s : seeds) {
    if (static_cast<int>(nests.size()) == params.population) break;
    nests.push_back(s);
  }
  while (static_cast<int>(nests.size()) < params.population) {
    std::uint64_t draw = rng();
    nests.push_back(sample(draw));
  }
  std::vector<double> fitness(nests.size());
  for (std::size_t k = 0; k < nests.size(); ++k) {
    repair(nests[k]);
    fitness[k] = objective(nests[k]);
    ++res.evaluations;
  }
  auto best_index = [&] {
    return static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
  };
  std::size_t best = best_index();
  const std::size_t dim = nests.front().size();

  std::vector<double> trial(dim);
  for (int gen = 0; gen < generations; ++gen) {
    // Levy flights around each nest, biased by its distance from the best.
    for (std::size_t k = 0; k < nests.size(); ++k) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double u = normal(rng) * sigma_u;
        const double v = normal(rng);
        const double step = u / std::pow(std::abs(v), 1.0 / params.levy_exponent);
        trial[d] = nests[k][d] + params.step_scale * step * (nests[k][d] - nests[best][d]) * normal(rng);
      }
      repair(trial);
      const double f = objective(trial);
      ++res.evaluations;
      if (f > fitness[k]) {
        nests[k] = trial;
        fitness[k] = f;
      }
    }
    best = best_index();

    // A fraction of the nests is discovered and rebuilt by a biased random walk.
    std::vector<std::size_t> p1(nests.size()), p2(nests.size());
    for (std::size_t k = 0; k < nests.size(); ++k) p1[k] = p2[k] = k;
    std::shuffle(p1.begin(), p1.end(), rng);
    std::shuffle(p2.begin(), p2.end(), rng);
    for (std::size_t k = 0; k < nests.size(); ++k) {
      const double r = unit(rng);
      for (std::size_t d = 0; d < dim; ++d) {
        const bool discovered = unit(rng) < params.discovery_probability;
        trial[d] = nests[k][d] + (discovered ? r * (nests[p1[k]][d] - nests[p2[k]][d]) : 0.0);
      }
      repair(trial);
      const double f = objective(trial);
      ++res.evaluations;
      if (f > fitness[k]) {
        nests[k] = trial;
        fitness[k] = f;
      }
    }
    best = best_index();
    res.generations = gen + 1;
  }
  res.best = nests[best];
  res.best_value = fitness[best];
  return res;
}

} // namespace slicegame
