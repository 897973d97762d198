#pragma once

// JSON and CSV formats for scenarios, weight profiles, solver results and
// Monte Carlo reports.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "slicegame/abrd.hpp"
#include "slicegame/equilibrium.hpp"
#include "slicegame/experiments.hpp"
#include "slicegame/sweeps.hpp"

namespace slicegame {

using Json = nlohmann::ordered_json;

inline constexpr const char *kVersion = "1.0.0";

/// Scenario: {"cells": [{"n_users", "capacity", "r0"} | {"n_users", "gamma"}],
/// "shares": [...], "price": p, "alpha": a}. "gamma": null means r0 = 0.
/// Errors name the offending field, e.g. "cells[2].n_users".
Scenario scenario_from_json(const Json &j);
Json to_json(const Scenario &scenario);

/// Row-per-tenant matrix.
WeightProfile weights_from_json(const Json &j);
Json to_json(const WeightProfile &weights);

Json to_json(const EquilibriumResult &result);

AbrdConfig abrd_config_from_json(const Json &j);
Json to_json(const AbrdConfig &config);

ScenarioFamily family_from_json(const Json &j);
Json to_json(const ScenarioFamily &family);

/// `include_samples` adds the raw pooled deviations.
Json to_json(const DeviationReport &report, bool include_samples = false);

/// Parses a file; parse errors carry line and column.
Json read_json_file(const std::string &path);

/// Metadata attached to every output: artifact, version, the given extras,
/// and a UTC timestamp unless `deterministic`.
Json metadata(const Json &extras, bool deterministic);

/// Shortest round-trip decimal representation, '.' separator.
std::string format_number(double v);

/// Metadata as leading '#' lines, then a header row and one row per record.
void write_csv(std::ostream &os, const Table &table, const Json &meta);
void write_histogram_csv(std::ostream &os, const std::vector<HistogramBin> &bins, const Json &meta);

} // namespace slicegame
