#pragma once

// Game instance and market evaluation: per-cell proportional allocation of
// tenant weights, logit subscription, and tenant revenues with their
// first and second derivatives.

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "slicegame/root_finding.hpp"

namespace slicegame {

class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Smallest weight used inside numerical routines; the strategy set is open.
inline constexpr double kWeightFloor = 1e-12;

struct CellSpec {
  int n_users = 1;
  double capacity = 1.0;
  double r0 = 1.0; // virtual capacity of not subscribing; 0 means everyone subscribes

  bool operator==(const CellSpec &) const = default;
};

/// c / (n p r0); +inf when r0 = 0.
double normalized_capacity(const CellSpec &cell, double price);

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

  const std::vector<double> &data() const { return data_; }

  bool operator==(const Matrix &) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Immutable game instance. beta = alpha / (alpha + 1) and the per-cell
/// normalized capacities are cached at construction.
class Scenario {
public:
  Scenario(std::vector<CellSpec> cells, std::vector<double> shares, double price, double alpha);

  /// Builds cells from normalized capacities, back-solving capacity with
  /// r0 = 1. An infinite gamma becomes r0 = 0 with capacity = n_users * price.
  static Scenario from_gammas(std::span<const int> n_users, std::span<const double> gammas,
                              std::vector<double> shares, double price, double alpha);

  const std::vector<CellSpec> &cells() const { return cells_; }
  const std::vector<double> &shares() const { return shares_; }
  const std::vector<double> &gammas() const { return gammas_; }
  double price() const { return price_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_tenants() const { return shares_.size(); }
  double total_users() const;

  bool operator==(const Scenario &other) const;

private:
  std::vector<CellSpec> cells_;
  std::vector<double> shares_;
  double price_;
  double alpha_;
  double beta_;
  std::vector<double> gammas_;
};

/// Strategy profile: weights(tenant, cell), every entry strictly positive.
class WeightProfile {
public:
  WeightProfile() = default;
  explicit WeightProfile(Matrix weights);

  std::size_t num_tenants() const { return w_.rows(); }
  std::size_t num_cells() const { return w_.cols(); }
  double operator()(std::size_t tenant, std::size_t cell) const { return w_(tenant, cell); }
  std::span<const double> tenant(std::size_t i) const { return w_.row(i); }
  std::vector<double> cell(std::size_t j) const { return w_.column(j); }
  const Matrix &matrix() const { return w_; }

  /// Copy with one tenant's row replaced.
  WeightProfile with_tenant(std::size_t tenant, std::span<const double> row) const;

  /// Throws ValidationError unless dimensions match and every row fits its
  /// share (sum <= s_i + 1e-12).
  void check_feasible(const Scenario &scenario) const;

  bool operator==(const WeightProfile &) const = default;

private:
  Matrix w_;
};

/// Matrices here are indexed (cell, tenant).
struct MarketState {
  std::vector<double> sigma;
  std::vector<double> unsubscribed; // 1 - sigma, kept separately for precision
  Matrix rho;
  Matrix subscribers;
  Matrix allocation; // resources R granted to each tenant's slice
  Matrix per_user_resources;
  std::vector<double> revenues;
};

// ---- per-cell kernels --------------------------------------------------

/// sum(w^beta) / (sum w)^beta; lies in [1, |S|^(1-beta)].
double weight_concentration(std::span<const double> cell_weights, double beta);

/// Penetration root for one cell (sigma and 1 - sigma).
PenetrationRoot subscription_root(std::span<const double> cell_weights, double gamma, double beta);

/// Fraction of the cell's users that subscribe to any tenant.
double subscription_ratio(std::span<const double> cell_weights, double gamma, double beta);

/// rho_i = w_i^beta / sum_t w_t^beta.
std::vector<double> tenant_fractions(std::span<const double> cell_weights, double beta);

// ---- whole-market evaluation -------------------------------------------

MarketState market_state(const Scenario &scenario, const WeightProfile &weights);

/// Revenue of one tenant; cheaper than a full market_state.
double tenant_revenue(const Scenario &scenario, const WeightProfile &weights, std::size_t tenant);

/// Tenant-local view of one cell: what the tenant's revenue in this cell
/// depends on once the other tenants' weights are fixed.
struct CellContext {
  double n_users = 0.0;
  double gamma = 0.0;
  double others_sum = 0.0;     // sum of the other tenants' weights
  double others_pow_sum = 0.0; // sum of the other tenants' weights^beta
};

struct TenantCellTerms {
  double omega = 0.0;
  double sigma = 0.0;
  double unsubscribed = 0.0;
  double rho = 0.0;
  double share_of_weight = 0.0; // x = omega / sum_t omega_t
  double subscribers = 0.0;     // n sigma rho
};

CellContext cell_context(const Scenario &scenario, const WeightProfile &weights, std::size_t tenant,
                         std::size_t cell);
TenantCellTerms tenant_cell_terms(const CellContext &ctx, double omega, double beta);

/// dPi_i / d omega_i^(j) for one cell, in closed form.
double revenue_derivative(const TenantCellTerms &t, double n_users, double price, double beta);

/// d^2 Pi_i / d (omega_i^(j))^2 for one cell, in closed form.
double revenue_second_derivative(const TenantCellTerms &t, double n_users, double price, double beta);

/// Gradient of tenant i's revenue with respect to its own weights. Every
/// component is strictly positive.
std::vector<double> revenue_gradient(const Scenario &scenario, const WeightProfile &weights,
                                     std::size_t tenant);

/// Hessian of tenant i's revenue with respect to its own weights. A cell's
/// weight only enters that cell's subscriber count, so the mixed partials
/// across cells vanish identically and only the diagonal is stored.
struct TenantHessian {
  std::vector<double> diagonal;
  static constexpr double cross_cell = 0.0;

  double operator()(std::size_t j, std::size_t k) const { return j == k ? diagonal[j] : cross_cell; }
};

TenantHessian revenue_hessian_diag(const Scenario &scenario, const WeightProfile &weights,
                                   std::size_t tenant);

} // namespace slicegame
