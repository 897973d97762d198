#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "slicegame/experiments.hpp"
#include "slicegame/sweeps.hpp"

using namespace slicegame;

namespace {

ScenarioFamily small_family() {
  ScenarioFamily f;
  f.num_tenants = 3;
  f.num_cells = 4;
  f.replications = 12;
  f.rng_seed = 5;
  return f;
}

std::size_t column(const Table &t, std::string_view name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  REQUIRE(it != t.columns.end());
  return static_cast<std::size_t>(it - t.columns.begin());
}

} // namespace

TEST_CASE("family validation") {
  ScenarioFamily f;
  CHECK_NOTHROW(f.validate());
  f.min_share = 0.3; // 4 * 0.3 > 1
  CHECK_THROWS_AS(f.validate(), ValidationError);
  f = ScenarioFamily{};
  f.gamma_min = 3.0;
  f.gamma_max = 2.0;
  CHECK_THROWS_AS(f.validate(), ValidationError);
  f = ScenarioFamily{};
  f.replications = 0;
  CHECK_THROWS_AS(f.validate(), ValidationError);
}

TEST_CASE("generated scenarios") {
  ScenarioFamily f;
  f.gamma_min = f.gamma_max = 2.0;
  const Scenario sc = gen_scenario(f, 3);
  for (double g : sc.gammas()) CHECK(g == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(homogeneity_check(sc));

  f = ScenarioFamily{};
  f.gamma_min = 0.0;
  f.gamma_max = 0.0;
  const Scenario clipped = gen_scenario(f, 0);
  for (double g : clipped.gammas()) CHECK(g == doctest::Approx(1e-9));

  f = ScenarioFamily{};
  for (std::size_t k = 0; k < 1000; ++k) {
    const Scenario s = gen_scenario(f, k);
    CHECK(s.num_tenants() == 4);
    CHECK(s.num_cells() == 20);
    CHECK(s.alpha() == 3.0);
    for (double g : s.gammas()) {
      CHECK(g >= 0.25 * (1 - 1e-14));
      CHECK(g <= 4.0 * (1 + 1e-14));
    }
    for (double x : s.shares()) CHECK(x >= 0.1 - 1e-15);
  }
  CHECK(gen_scenario(f, 17) == gen_scenario(f, 17));
  CHECK_FALSE(gen_scenario(f, 17) == gen_scenario(f, 18));
  ScenarioFamily other = f;
  other.rng_seed = 2;
  CHECK_FALSE(gen_scenario(f, 17) == gen_scenario(other, 17));
}

TEST_CASE("share sampler is symmetric") {
  ScenarioFamily f;
  f.num_cells = 1;
  const int draws = 10000;
  std::vector<double> sum(4, 0.0), sum_sq(4, 0.0);
  for (int k = 0; k < draws; ++k) {
    const Scenario s = gen_scenario(f, static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < 4; ++i) {
      sum[i] += s.shares()[i];
      sum_sq[i] += s.shares()[i] * s.shares()[i];
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double mean = sum[i] / draws;
    const double var = sum_sq[i] / draws - mean * mean;
    CHECK(std::abs(mean - 0.25) < 3.0 * std::sqrt(var / draws));
  }
}

TEST_CASE("nearest-rank percentile") {
  CHECK(nearest_rank_percentile({15, 20, 35, 40, 50}, 30) == 20);
  CHECK(nearest_rank_percentile({15, 20, 35, 40, 50}, 40) == 20);
  CHECK(nearest_rank_percentile({15, 20, 35, 40, 50}, 50) == 35);
  CHECK(nearest_rank_percentile({15, 20, 35, 40, 50}, 100) == 50);
  CHECK(nearest_rank_percentile({3, 1, 2}, 0.1) == 1);
  CHECK(std::isnan(nearest_rank_percentile({}, 50)));
  CHECK_THROWS(nearest_rank_percentile({1.0}, 0.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {100, 1000, 10000}) {
    std::vector<double> sample(n);
    for (double &x : sample) x = u(rng);
    CHECK(std::abs(nearest_rank_percentile(sample, 90) - 0.9) < 1.0 / std::sqrt(n));
    CHECK(nearest_rank_percentile(sample, 90) <= nearest_rank_percentile(sample, 95));
  }
}

TEST_CASE("histogram") {
  const std::vector<double> sample{-0.25, -0.05, 0.0, 0.05, 0.1, 0.35};
  const std::vector<HistogramBin> bins = histogram(sample, 0.1);
  REQUIRE(bins.size() == 7);
  CHECK(bins.front().left == doctest::Approx(-0.3));
  CHECK(bins.back().right == doctest::Approx(0.4));
  std::size_t total = 0;
  for (const HistogramBin &b : bins) {
    total += b.count;
    CHECK(b.right - b.left == doctest::Approx(0.1));
  }
  CHECK(total == sample.size());
  CHECK(bins[2].count == 1); // [-0.1, 0)
  CHECK(bins[3].count == 2); // [0, 0.1)
  CHECK(histogram({}, 0.5).empty());
  CHECK_THROWS(histogram(sample, 0.0));
}

TEST_CASE("homogeneous family has no deviation") {
  ScenarioFamily f = small_family();
  f.gamma_min = f.gamma_max = 1.5;
  const DeviationReport r = deviation_study_serial(f, AbrdConfig{});
  CHECK(r.failed_replications == 0);
  CHECK(r.replications == 12);
  CHECK(r.eps_rho.size() == 12 * 3 * 4);
  CHECK(r.eps_sigma.size() == 12 * 4);
  for (double e : r.eps_rho) CHECK(std::abs(e) < 1e-6);
  for (double e : r.eps_sigma) CHECK(std::abs(e) < 1e-6);
}

TEST_CASE("deviation report") {
  const ScenarioFamily f = small_family();
  const DeviationReport serial = deviation_study_serial(f, AbrdConfig{});
  const DeviationReport parallel = deviation_study(f, AbrdConfig{});
  CHECK(serial == parallel);
  CHECK(serial == deviation_study_serial(f, AbrdConfig{}));

  CHECK(serial.rho_abs.p90 <= serial.rho_abs.p95);
  CHECK(serial.sigma_abs.p90 <= serial.sigma_abs.p95);
  for (double e : serial.eps_rho) CHECK(std::isfinite(e));
  REQUIRE(serial.eps_rho_by_tenant.size() == 3);
  for (const auto &by : serial.eps_rho_by_tenant) CHECK(by.size() == 12 * 4);

  std::size_t counted = 0;
  for (const HistogramBin &b : serial.rho_histogram) {
    counted += b.count;
    CHECK(b.right - b.left == doctest::Approx(0.5));
  }
  CHECK(counted == serial.eps_rho.size());
  counted = 0;
  for (const HistogramBin &b : serial.sigma_histogram) {
    counted += b.count;
    CHECK(b.right - b.left == doctest::Approx(0.1));
  }
  CHECK(counted == serial.eps_sigma.size());

  ScenarioFamily reseeded = f;
  reseeded.rng_seed = 6;
  CHECK_FALSE(deviation_study(reseeded, AbrdConfig{}) == serial);
}

TEST_CASE("non-converged replications are excluded and counted") {
  ScenarioFamily f = small_family();
  f.replications = 4;
  AbrdConfig c;
  c.max_rounds = 1;
  const DeviationReport r = deviation_study(f, c);
  CHECK(r.failed_replications == 4);
  CHECK(r.failed_indices == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(r.eps_rho.empty());
  CHECK(std::isnan(r.rho_abs.p95));
}

TEST_CASE("sweep: subscription ratio versus number of tenants") {
  SweepParams p;
  const Table t = sweep(SweepKind::sigma_vs_S_alpha, p);
  REQUIRE(t.rows.size() == 10);
  REQUIRE(t.columns.size() == 1 + p.alphas.size());
  for (std::size_t r = 1; r < t.rows.size(); ++r)
    for (std::size_t c = 1; c < t.columns.size(); ++c) CHECK(t.rows[r][c] > t.rows[r - 1][c]);
  CHECK(t.rows[0][0] == 1.0);

  const Table g = sweep(SweepKind::sigma_vs_S_gamma, p);
  REQUIRE(g.columns.size() == 1 + p.gammas.size());
  for (const auto &row : g.rows)
    for (std::size_t c = 2; c < g.columns.size(); ++c) CHECK(row[c] > row[c - 1]);
}

TEST_CASE("sweep: tenant 1 fraction bounds") {
  SweepParams p;
  p.grid_points = 50;
  const Table t = sweep(SweepKind::rho1_vs_share_bounds, p);
  const std::size_t lo = column(t, "rho1_min"), hi = column(t, "rho1_max"), x = column(t, "s1");
  REQUIRE(t.rows.size() == 50);
  for (const auto &row : t.rows) {
    CHECK(row[x] > 0.0);
    CHECK(row[x] <= 1.0);
    CHECK(row[lo] <= row[hi] + 1e-15);
  }
  CHECK(t.rows.back()[x] == 1.0);
  CHECK(t.rows.back()[lo] == doctest::Approx(1.0));
  CHECK(t.rows.back()[hi] == doctest::Approx(1.0));
}

TEST_CASE("sweep: subscription ratio versus share equality") {
  SweepParams p;
  p.grid_points = 40;
  const Table t = sweep(SweepKind::sigma_vs_share_equality, p);
  REQUIRE(t.columns.size() == 1 + p.gammas.size());
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    CHECK(t.rows[r][0] > t.rows[r - 1][0]);
    for (std::size_t c = 1; c < t.columns.size(); ++c) CHECK(t.rows[r][c] > t.rows[r - 1][c]);
  }
}

TEST_CASE("sweep: heterogeneous profile") {
  SweepParams p;
  const Table t = sweep(SweepKind::het_profile, p);
  CHECK(t.rows.size() == p.share_values.size() * p.het_gammas.size());
  const std::size_t conv = column(t, "abrd_converged");
  for (const auto &row : t.rows) CHECK(row[conv] == 1.0);
  CHECK_THROWS_AS(sweep_kind_from_string("fig9"), ValidationError);
  for (SweepKind k : {SweepKind::sigma_vs_S_alpha, SweepKind::sigma_vs_S_gamma, SweepKind::rho1_vs_share_bounds,
                      SweepKind::sigma_vs_share_equality, SweepKind::het_profile})
    CHECK(sweep_kind_from_string(to_string(k)) == k);
}
