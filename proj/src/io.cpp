#include "slicegame/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

namespace slicegame {

namespace {

const Json &field(const Json &j, const char *key, const std::string &where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + "." + key + ": missing field");
  return *it;
}

double number(const Json &j, const std::string &where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

long long integer(const Json &j, const std::string &where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<long long>();
}

std::uint64_t unsigned_integer(const Json &j, const std::string &where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ValidationError(where + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::vector<double> number_array(const Json &j, const std::string &where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Json matrix_json(const Matrix &m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (double v : m.row(r)) row.push_back(v);
    out.push_back(std::move(row));
  }
  return out;
}

// JSON has no infinity; encode it as null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace

// ---- scenario / weights ---------------------------------------------------

Scenario scenario_from_json(const Json &j) {
  const std::string root = "scenario";
  const Json &cells_j = field(j, "cells", root);
  if (!cells_j.is_array() || cells_j.empty()) throw ValidationError("scenario.cells: expected a non-empty array");
  const double price = j.contains("price") ? number(j["price"], "scenario.price") : 1.0;
  const double alpha = number(field(j, "alpha", root), "scenario.alpha");
  std::vector<double> shares = number_array(field(j, "shares", root), "scenario.shares");

  std::vector<CellSpec> cells;
  for (std::size_t k = 0; k < cells_j.size(); ++k) {
    const std::string where = "scenario.cells[" + std::to_string(k) + "]";
    const Json &c = cells_j[k];
    const long long n = integer(field(c, "n_users", where), where + ".n_users");
    if (n < 1) throw ValidationError(where + ".n_users: must be >= 1");
    CellSpec cell;
    cell.n_users = static_cast<int>(n);
    if (c.contains("gamma")) {
      if (c.contains("r0")) throw ValidationError(where + ": give either gamma or capacity/r0, not both");
      const Json &g = c["gamma"];
      if (g.is_null()) {
        cell.r0 = 0.0;
        cell.capacity = c.contains("capacity") ? number(c["capacity"], where + ".capacity") : n * price;
      } else {
        const double gamma = number(g, where + ".gamma");
        if (!(gamma > 0.0)) throw ValidationError(where + ".gamma: must be > 0");
        cell.r0 = 1.0;
        cell.capacity = gamma * static_cast<double>(n) * price;
      }
    } else {
      cell.capacity = number(field(c, "capacity", where), where + ".capacity");
      cell.r0 = number(field(c, "r0", where), where + ".r0");
    }
    cells.push_back(cell);
  }
  return Scenario(std::move(cells), std::move(shares), price, alpha);
}

Json to_json(const Scenario &scenario) {
  Json cells = Json::array();
  for (const CellSpec &c : scenario.cells())
    cells.push_back({{"n_users", c.n_users}, {"capacity", c.capacity}, {"r0", c.r0}});
  return {{"cells", cells}, {"shares", scenario.shares()}, {"price", scenario.price()}, {"alpha", scenario.alpha()}};
}

WeightProfile weights_from_json(const Json &j) {
  const Json &m = j.is_object() ? field(j, "weights", "weights") : j;
  if (!m.is_array() || m.empty()) throw ValidationError("weights: expected a non-empty matrix");
  const std::size_t cols = m[0].is_array() ? m[0].size() : 0;
  Matrix w(m.size(), cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::vector<double> row = number_array(m[i], "weights[" + std::to_string(i) + "]");
    if (row.size() != cols) throw ValidationError("weights[" + std::to_string(i) + "]: ragged matrix");
    std::copy(row.begin(), row.end(), w.row(i).begin());
  }
  return WeightProfile(std::move(w));
}

Json to_json(const WeightProfile &weights) { return matrix_json(weights.matrix()); }

Json to_json(const EquilibriumResult &r) {
  Json diag = {{"converged", r.diagnostics.converged},
               {"rounds", r.diagnostics.rounds},
               {"best_response_calls", r.diagnostics.best_response_calls},
               {"stalled_best_responses", r.diagnostics.stalled_best_responses},
               {"homogeneous", r.diagnostics.homogeneous},
               {"multipliers", r.diagnostics.multipliers}};
  Json concave = Json::array();
  for (bool b : r.diagnostics.locally_concave) concave.push_back(b);
  diag["locally_concave"] = concave;
  return {{"method", std::string(to_string(r.method))},
          {"weights", to_json(r.weights)},
          {"sigma", r.state.sigma},
          {"rho", matrix_json(r.state.rho)},
          {"subscribers", matrix_json(r.state.subscribers)},
          {"per_user_resources", matrix_json(r.state.per_user_resources)},
          {"revenues", r.state.revenues},
          {"kkt_residual", r.kkt_residual},
          {"budget_residual", r.budget_residual},
          {"diagnostics", diag}};
}

// ---- configs ----------------------------------------------------------------

AbrdConfig abrd_config_from_json(const Json &j) {
  AbrdConfig c;
  if (!j.is_object()) throw ValidationError("abrd_config: expected an object");
  if (j.contains("tolerance")) c.tolerance = number(j["tolerance"], "abrd_config.tolerance");
  if (j.contains("max_rounds")) c.max_rounds = static_cast<int>(integer(j["max_rounds"], "abrd_config.max_rounds"));
  if (j.contains("rng_seed")) c.rng_seed = unsigned_integer(j["rng_seed"], "abrd_config.rng_seed");
  if (j.contains("br_iters")) c.br_iters = static_cast<int>(integer(j["br_iters"], "abrd_config.br_iters"));
  if (j.contains("br_method")) {
    const Json &m = j["br_method"];
    if (m == "gradient")
      c.br_method = BestResponseMethod::gradient;
    else if (m == "heuristic")
      c.br_method = BestResponseMethod::heuristic;
    else
      throw ValidationError("abrd_config.br_method: expected \"gradient\" or \"heuristic\"");
  }
  if (j.contains("cuckoo")) {
    const Json &k = j["cuckoo"];
    if (k.contains("population"))
      c.cuckoo.population = static_cast<int>(integer(k["population"], "abrd_config.cuckoo.population"));
    if (k.contains("discovery_probability"))
      c.cuckoo.discovery_probability = number(k["discovery_probability"], "abrd_config.cuckoo.discovery_probability");
    if (k.contains("levy_exponent"))
      c.cuckoo.levy_exponent = number(k["levy_exponent"], "abrd_config.cuckoo.levy_exponent");
    if (k.contains("step_scale")) c.cuckoo.step_scale = number(k["step_scale"], "abrd_config.cuckoo.step_scale");
  }
  c.validate();
  return c;
}

Json to_json(const AbrdConfig &c) {
  return {{"tolerance", c.tolerance},
          {"max_rounds", c.max_rounds},
          {"rng_seed", c.rng_seed},
          {"br_method", c.br_method == BestResponseMethod::gradient ? "gradient" : "heuristic"},
          {"br_iters", c.br_iters},
          {"cuckoo",
           {{"population", c.cuckoo.population},
            {"discovery_probability", c.cuckoo.discovery_probability},
            {"levy_exponent", c.cuckoo.levy_exponent},
            {"step_scale", c.cuckoo.step_scale}}}};
}

ScenarioFamily family_from_json(const Json &j) {
  const std::string root = "family";
  ScenarioFamily f;
  f.num_tenants = static_cast<int>(integer(field(j, "num_tenants", root), "family.num_tenants"));
  f.num_cells = static_cast<int>(integer(field(j, "num_cells", root), "family.num_cells"));
  f.alpha = number(field(j, "alpha", root), "family.alpha");
  const std::vector<double> range = number_array(field(j, "gamma_range", root), "family.gamma_range");
  if (range.size() != 2) throw ValidationError("family.gamma_range: expected [gamma_min, gamma_max]");
  f.gamma_min = range[0];
  f.gamma_max = range[1];
  if (j.contains("replications")) f.replications = static_cast<int>(integer(j["replications"], "family.replications"));
  if (j.contains("rng_seed")) f.rng_seed = unsigned_integer(j["rng_seed"], "family.rng_seed");
  if (j.contains("min_share")) f.min_share = number(j["min_share"], "family.min_share");
  if (j.contains("users_per_cell"))
    f.users_per_cell = static_cast<int>(integer(j["users_per_cell"], "family.users_per_cell"));
  if (j.contains("price")) f.price = number(j["price"], "family.price");
  f.validate();
  return f;
}

Json to_json(const ScenarioFamily &f) {
  return {{"num_tenants", f.num_tenants},       {"num_cells", f.num_cells},
          {"alpha", f.alpha},                   {"gamma_range", {f.gamma_min, f.gamma_max}},
          {"replications", f.replications},     {"rng_seed", f.rng_seed},
          {"min_share", f.min_share},           {"users_per_cell", f.users_per_cell},
          {"price", f.price}};
}

Json to_json(const DeviationReport &rep, bool include_samples) {
  auto bins = [](const std::vector<HistogramBin> &h) {
    Json out = Json::array();
    for (const HistogramBin &b : h) out.push_back({b.left, b.right, b.count});
    return out;
  };
  Json per_tenant = Json::array();
  for (const auto &v : rep.eps_rho_by_tenant) {
    std::vector<double> a(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) a[k] = std::abs(v[k]);
    per_tenant.push_back({{"p90_percent", finite_or_null(100.0 * nearest_rank_percentile(a, 90.0))},
                          {"p95_percent", finite_or_null(100.0 * nearest_rank_percentile(a, 95.0))}});
  }
  Json out = {{"replications", rep.replications},
              {"failed_replications", rep.failed_replications},
              {"failed_indices", rep.failed_indices},
              {"rho_abs_percent",
               {{"p90", finite_or_null(100.0 * rep.rho_abs.p90)}, {"p95", finite_or_null(100.0 * rep.rho_abs.p95)}}},
              {"sigma_abs_percent",
               {{"p90", finite_or_null(100.0 * rep.sigma_abs.p90)},
                {"p95", finite_or_null(100.0 * rep.sigma_abs.p95)}}},
              {"rho_by_tenant_abs_percent", per_tenant},
              {"rho_histogram_percent", bins(rep.rho_histogram)},
              {"sigma_histogram_percent", bins(rep.sigma_histogram)}};
  if (include_samples) {
    out["eps_rho"] = rep.eps_rho;
    out["eps_sigma"] = rep.eps_sigma;
  }
  return out;
}

// ---- files ------------------------------------------------------------------

Json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Json metadata(const Json &extras, bool deterministic) {
  Json meta = {{"artifact", "slicegame"}, {"version", kVersion}};
  for (auto it = extras.begin(); it != extras.end(); ++it) meta[it.key()] = it.value();
  if (!deterministic) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta["timestamp"] = buf;
  }
  return meta;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void write_meta_lines(std::ostream &os, const Json &meta) {
  for (auto it = meta.begin(); it != meta.end(); ++it)
    os << "# " << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
}

} // namespace

void write_csv(std::ostream &os, const Table &table, const Json &meta) {
  write_meta_lines(os, meta);
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto &row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

void write_histogram_csv(std::ostream &os, const std::vector<HistogramBin> &bins, const Json &meta) {
  write_meta_lines(os, meta);
  os << "bin_left,bin_right,count\n";
  for (const HistogramBin &b : bins) os << format_number(b.left) << ',' << format_number(b.right) << ',' << b.count << '\n';
}

} // namespace slicegame
