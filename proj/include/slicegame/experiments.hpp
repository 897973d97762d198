#pragma once

// Monte Carlo comparison of the proposed solution against ABRD equilibria
// over randomly generated scenario families.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slicegame/abrd.hpp"
#include "slicegame/model.hpp"

namespace slicegame {

struct ScenarioFamily {
  int num_tenants = 4;
  int num_cells = 20;
  double alpha = 3.0;
  double gamma_min = 0.25;
  double gamma_max = 4.0;
  int replications = 1000;
  std::uint64_t rng_seed = 1;
  double min_share = 0.1;
  int users_per_cell = 100;
  double price = 1.0;

  void validate() const;
};

/// Replication `index` of the family. Depends only on (rng_seed, index).
Scenario gen_scenario(const ScenarioFamily &family, std::size_t index);

/// Per-replication seed, a pure function of the family seed and index.
std::uint64_t replication_seed(std::uint64_t family_seed, std::size_t index);

struct ReplicationOutcome {
  std::size_t index = 0;
  bool converged = false;
  int abrd_rounds = 0;
  Matrix eps_rho;                 // (cell, tenant)
  std::vector<double> eps_sigma;  // per cell
};

/// One replication: proposed solution vs ABRD on gen_scenario(family, index).
/// eps = (proposed - abrd) / abrd.
ReplicationOutcome run_replication(const ScenarioFamily &family, const AbrdConfig &abrd_config,
                                   std::size_t index);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

struct Percentiles {
  double p90 = 0.0;
  double p95 = 0.0;
};

struct DeviationReport {
  // Pooled signed deviations (fractions, not percent), in replication order.
  std::vector<double> eps_rho;
  std::vector<double> eps_sigma;
  std::vector<std::vector<double>> eps_rho_by_tenant;
  Percentiles rho_abs;   // of |eps_rho|
  Percentiles sigma_abs; // of |eps_sigma|
  std::vector<HistogramBin> rho_histogram;   // in percent
  std::vector<HistogramBin> sigma_histogram; // in percent
  std::size_t replications = 0;
  std::size_t failed_replications = 0;
  std::vector<std::size_t> failed_indices;

  bool operator==(const DeviationReport &) const = default;
};

bool operator==(const HistogramBin &a, const HistogramBin &b);
bool operator==(const Percentiles &a, const Percentiles &b);

struct HistogramWidths {
  double sigma_percent = 0.1;
  double rho_percent = 0.5;
};

/// Reference implementation: replications evaluated one after another.
DeviationReport deviation_study_serial(const ScenarioFamily &family, const AbrdConfig &abrd_config,
                                       const HistogramWidths &widths = {});

/// Replications spread over OpenMP threads; identical output to the serial
/// version because each replication is seeded independently and results are
/// assembled by index.
DeviationReport deviation_study(const ScenarioFamily &family, const AbrdConfig &abrd_config,
                                const HistogramWidths &widths = {});

/// Assembles a report from outcomes ordered by replication index.
DeviationReport assemble_report(std::span<const ReplicationOutcome> outcomes, const HistogramWidths &widths);

/// Nearest-rank percentile (p in (0, 100]) of an unsorted sample.
double nearest_rank_percentile(std::vector<double> sample, double p);

/// Fixed-width histogram aligned at zero, covering the sample's range.
std::vector<HistogramBin> histogram(std::span<const double> sample, double width);

} // namespace slicegame
