#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace slicegame {

struct CuckooParams {
  int population = 25;
  double discovery_probability = 0.25;
  double levy_exponent = 1.5;
  double step_scale = 0.01;
};

struct CuckooResult {
  std::vector<double> best;
  double best_value = 0.0;
  int generations = 0;
  int evaluations = 0;
};

/// Cuckoo search with Levy flights (Mantegna step generator), maximizing
/// `objective`. Candidates are passed through `repair` before evaluation so
/// the caller controls feasibility. `seeds` are inserted into the initial
/// population as-is (after repair); the rest is drawn by `sample`.
CuckooResult cuckoo_maximize(const std::function<double(const std::vector<double> &)> &objective,
                             const std::function<void(std::vector<double> &)> &repair,
                             const std::function<std::vector<double>(std::uint64_t &)> &sample,
                             const std::vector<std::vector<double>> &seeds, int generations,
                             const CuckooParams &params, std::uint64_t rng_seed);

} // namespace slicegame
