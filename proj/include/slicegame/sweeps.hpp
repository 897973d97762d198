#pragma once

// Parameter sweeps producing plot-ready tables.

#include <string>
#include <string_view>
#include <vector>

#include "slicegame/abrd.hpp"

namespace slicegame {

enum class SweepKind {
  sigma_vs_S_alpha,        // equal shares, gamma = 1, |S| = 1..max_tenants, one column per alpha
  sigma_vs_S_gamma,        // equal shares, alpha fixed, one column per gamma
  rho1_vs_share_bounds,    // 4 tenants: tenant 1's fraction vs s_1, best and worst competitor split
  sigma_vs_share_equality, // sigma vs sum_t s_t^beta, one column per gamma
  het_profile,             // proposed vs ABRD on the 5-cell heterogeneous scenario
};

std::string_view to_string(SweepKind kind);
SweepKind sweep_kind_from_string(std::string_view name);

struct SweepParams {
  int max_tenants = 10;
  int num_tenants = 4;
  double alpha = 3.0;
  std::vector<double> alphas{1.0, 3.0, 5.0, 7.0};
  std::vector<double> gammas{0.25, 0.5, 1.0, 2.0, 4.0};
  int grid_points = 100;
  // het_profile
  std::vector<int> het_users{100, 200, 300, 400, 500};
  std::vector<double> het_gammas{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> share_values{0.1, 0.25, 0.4, 0.55, 0.7};
  AbrdConfig abrd{};
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Table sweep(SweepKind kind, const SweepParams &params);

/// Scenario used by het_profile: tenant 1 holds s1, the rest split equally.
Scenario heterogeneous_scenario(const SweepParams &params, double s1);

} // namespace slicegame
