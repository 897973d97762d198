#include "slicegame/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace slicegame {

double normalized_capacity(const CellSpec &cell, double price) {
  if (cell.r0 == 0.0) return kInfinity;
  return cell.capacity / (static_cast<double>(cell.n_users) * price * cell.r0);
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

// ---- Scenario -----------------------------------------------------------

Scenario::Scenario(std::vector<CellSpec> cells, std::vector<double> shares, double price, double alpha)
    : cells_(std::move(cells)), shares_(std::move(shares)), price_(price), alpha_(alpha),
      beta_(alpha / (alpha + 1.0)) {
  if (cells_.empty()) throw ValidationError("scenario: at least one cell is required");
  if (shares_.empty()) throw ValidationError("scenario: at least one tenant share is required");
  if (!(price_ > 0.0) || !std::isfinite(price_)) throw ValidationError("scenario: price must be > 0");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw ValidationError("scenario: alpha must be > 0");
  for (std::size_t j = 0; j < cells_.size(); ++j) {
    const CellSpec &c = cells_[j];
    const std::string where = "scenario: cells[" + std::to_string(j) + "]";
    if (c.n_users < 1) throw ValidationError(where + ".n_users must be >= 1");
    if (!(c.capacity > 0.0) || !std::isfinite(c.capacity))
      throw ValidationError(where + ".capacity must be > 0");
    if (!(c.r0 >= 0.0) || !std::isfinite(c.r0)) throw ValidationError(where + ".r0 must be >= 0");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < shares_.size(); ++i) {
    if (!(shares_[i] > 0.0))
      throw ValidationError("scenario: shares[" + std::to_string(i) + "] must be > 0");
    total += shares_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("scenario: shares must sum to 1");
  gammas_.reserve(cells_.size());
  for (const CellSpec &c : cells_) gammas_.push_back(normalized_capacity(c, price_));
}

Scenario Scenario::from_gammas(std::span<const int> n_users, std::span<const double> gammas,
                               std::vector<double> shares, double price, double alpha) {
  if (n_users.size() != gammas.size())
    throw ValidationError("scenario: n_users and gamma lists differ in length");
  std::vector<CellSpec> cells;
  cells.reserve(gammas.size());
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    const double n = static_cast<double>(n_users[j]);
    if (std::isinf(gammas[j])) {
      cells.push_back({n_users[j], n * price, 0.0});
    } else {
      if (!(gammas[j] > 0.0))
        throw ValidationError("scenario: gamma[" + std::to_string(j) + "] must be > 0");
      cells.push_back({n_users[j], gammas[j] * n * price, 1.0});
    }
  }
  return Scenario(std::move(cells), std::move(shares), price, alpha);
}

double Scenario::total_users() const {
  double n = 0.0;
  for (const CellSpec &c : cells_) n += c.n_users;
  return n;
}

bool Scenario::operator==(const Scenario &other) const {
  return cells_ == other.cells_ && shares_ == other.shares_ && price_ == other.price_ &&
         alpha_ == other.alpha_;
}

// ---- WeightProfile ------------------------------------------------------

WeightProfile::WeightProfile(Matrix weights) : w_(std::move(weights)) {
  for (std::size_t i = 0; i < w_.rows(); ++i)
    for (std::size_t j = 0; j < w_.cols(); ++j)
      if (!(w_(i, j) > 0.0) || !std::isfinite(w_(i, j)))
        throw ValidationError("weights[" + std::to_string(i) + "][" + std::to_string(j) +
                              "] must be a positive finite number");
}

WeightProfile WeightProfile::with_tenant(std::size_t tenant, std::span<const double> row) const {
  Matrix m = w_;
  std::copy(row.begin(), row.end(), m.row(tenant).begin());
  return WeightProfile(std::move(m));
}

void WeightProfile::check_feasible(const Scenario &scenario) const {
  if (num_tenants() != scenario.num_tenants() || num_cells() != scenario.num_cells())
    throw ValidationError("weights: expected " + std::to_string(scenario.num_tenants()) + "x" +
                          std::to_string(scenario.num_cells()) + " matrix, got " +
                          std::to_string(num_tenants()) + "x" + std::to_string(num_cells()));
  for (std::size_t i = 0; i < num_tenants(); ++i) {
    const auto row = tenant(i);
    const double used = std::accumulate(row.begin(), row.end(), 0.0);
    if (used > scenario.shares()[i] + 1e-12)
      throw ValidationError("weights: tenant " + std::to_string(i) + " exceeds its share");
  }
}

// ---- per-cell kernels ---------------------------------------------------

double weight_concentration(std::span<const double> cell_weights, double beta) {
  double sum = 0.0, pow_sum = 0.0;
  for (double w : cell_weights) {
    w = std::max(w, kWeightFloor);
    sum += w;
    pow_sum += std::pow(w, beta);
  }
  return pow_sum / std::pow(sum, beta);
}

PenetrationRoot subscription_root(std::span<const double> cell_weights, double gamma, double beta) {
  if (std::isinf(gamma)) return {1.0, 0.0, 0};
  return solve_penetration(std::pow(gamma, beta) * weight_concentration(cell_weights, beta), beta);
}

double subscription_ratio(std::span<const double> cell_weights, double gamma, double beta) {
  return subscription_root(cell_weights, gamma, beta).sigma;
}

std::vector<double> tenant_fractions(std::span<const double> cell_weights, double beta) {
  std::vector<double> rho(cell_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] = std::pow(std::max(cell_weights[i], kWeightFloor), beta);
    total += rho[i];
  }
  for (double &r : rho) r /= total;
  return rho;
}

// ---- whole market -------------------------------------------------------

MarketState market_state(const Scenario &scenario, const WeightProfile &weights) {
  const std::size_t cells = scenario.num_cells();
  const std::size_t tenants = scenario.num_tenants();
  const double beta = scenario.beta();

  MarketState st;
  st.sigma.resize(cells);
  st.unsubscribed.resize(cells);
  st.rho = Matrix(cells, tenants);
  st.subscribers = Matrix(cells, tenants);
  st.allocation = Matrix(cells, tenants);
  st.per_user_resources = Matrix(cells, tenants);
  st.revenues.assign(tenants, 0.0);

  for (std::size_t j = 0; j < cells; ++j) {
    const std::vector<double> w = weights.cell(j);
    const PenetrationRoot root = subscription_root(w, scenario.gammas()[j], beta);
    const std::vector<double> rho = tenant_fractions(w, beta);
    const double n = scenario.cells()[j].n_users;
    const double capacity = scenario.cells()[j].capacity;
    double wsum = 0.0;
    for (double x : w) wsum += std::max(x, kWeightFloor);

    st.sigma[j] = root.sigma;
    st.unsubscribed[j] = root.complement;
    for (std::size_t i = 0; i < tenants; ++i) {
      const double subs = n * root.sigma * rho[i];
      st.rho(j, i) = rho[i];
      st.subscribers(j, i) = subs;
      st.allocation(j, i) = std::max(w[i], kWeightFloor) / wsum * capacity;
      st.per_user_resources(j, i) = st.allocation(j, i) / subs;
    }
  }
  for (std::size_t i = 0; i < tenants; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < cells; ++j) total += st.subscribers(j, i);
    st.revenues[i] = scenario.price() * total;
  }
  return st;
}

CellContext cell_context(const Scenario &scenario, const WeightProfile &weights, std::size_t tenant,
                         std::size_t cell) {
  CellContext ctx;
  ctx.n_users = scenario.cells()[cell].n_users;
  ctx.gamma = scenario.gammas()[cell];
  for (std::size_t t = 0; t < weights.num_tenants(); ++t) {
    if (t == tenant) continue;
    const double w = std::max(weights(t, cell), kWeightFloor);
    ctx.others_sum += w;
    ctx.others_pow_sum += std::pow(w, scenario.beta());
  }
  return ctx;
}

TenantCellTerms tenant_cell_terms(const CellContext &ctx, double omega, double beta) {
  TenantCellTerms t;
  t.omega = std::max(omega, kWeightFloor);
  const double own_pow = std::pow(t.omega, beta);
  const double sum = ctx.others_sum + t.omega;
  const double pow_sum = ctx.others_pow_sum + own_pow;
  PenetrationRoot root;
  if (std::isinf(ctx.gamma)) {
    root = {1.0, 0.0, 0};
  } else {
    root = solve_penetration(std::pow(ctx.gamma, beta) * pow_sum / std::pow(sum, beta), beta);
  }
  t.sigma = root.sigma;
  t.unsubscribed = root.complement;
  t.rho = own_pow / pow_sum;
  t.share_of_weight = t.omega / sum;
  t.subscribers = ctx.n_users * t.sigma * t.rho;
  return t;
}

double revenue_derivative(const TenantCellTerms &t, double n_users, double price, double beta) {
  const double s = t.sigma, u = t.unsubscribed;
  const double damp = (1.0 - beta) + beta * u; // 1 - beta sigma
  const double lead = price * beta * n_users * s * t.rho / (t.omega * damp);
  return lead * ((1.0 - beta) * (1.0 - t.rho) * s + (1.0 - t.share_of_weight) * u);
}

double revenue_second_derivative(const TenantCellTerms &t, double n_users, double price, double beta) {
  const double s = t.sigma, u = t.unsubscribed;
  const double rho = t.rho, x = t.share_of_weight;
  const double damp = (1.0 - beta) + beta * u; // 1 - beta sigma
  const double ratio = u / damp;
  const double lead = price * beta * n_users * s * rho / (t.omega * t.omega);
  const double inner = (rho - x) * (rho - x) * (beta / damp) * (ratio - s) + x * x +
                       beta * (1.0 - rho) * (3.0 * rho - 2.0 * x) - rho;
  return lead * (ratio * inner - (1.0 - rho) * (1.0 - beta + 2.0 * beta * rho));
}

double tenant_revenue(const Scenario &scenario, const WeightProfile &weights, std::size_t tenant) {
  double total = 0.0;
  for (std::size_t j = 0; j < scenario.num_cells(); ++j) {
    const CellContext ctx = cell_context(scenario, weights, tenant, j);
    total += tenant_cell_terms(ctx, weights(tenant, j), scenario.beta()).subscribers;
  }
  return scenario.price() * total;
}

std::vector<double> revenue_gradient(const Scenario &scenario, const WeightProfile &weights,
                                     std::size_t tenant) {
  std::vector<double> g(scenario.num_cells());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const CellContext ctx = cell_context(scenario, weights, tenant, j);
    const TenantCellTerms t = tenant_cell_terms(ctx, weights(tenant, j), scenario.beta());
    g[j] = revenue_derivative(t, ctx.n_users, scenario.price(), scenario.beta());
  }
  return g;
}

TenantHessian revenue_hessian_diag(const Scenario &scenario, const WeightProfile &weights,
                                   std::size_t tenant) {
  TenantHessian h;
  h.diagonal.resize(scenario.num_cells());
  for (std::size_t j = 0; j < h.diagonal.size(); ++j) {
    const CellContext ctx = cell_context(scenario, weights, tenant, j);
    const TenantCellTerms t = tenant_cell_terms(ctx, weights(tenant, j), scenario.beta());
    h.diagonal[j] = revenue_second_derivative(t, ctx.n_users, scenario.price(), scenario.beta());
  }
  return h;
}

} // namespace slicegame
