// sweep.hpp: Grid evaluation of the recipes, manifests and p_h* traces

#pragma once

#include <string>
#include <vector>

#include "qhe/config.hpp"
#include "qhe/csv.hpp"

namespace qhe {

struct SweepOutput {
    Table table;
    nlohmann::json manifest;
};

// Columns echoed for every row, in order.
const std::vector<std::string>& input_columns();

// Evaluates every grid point with `workers` threads. Row order is the grid
// index order whatever the worker count; per-point failures fill the `error`
// column and leave the outputs empty. The manifest carries no timing unless
// `wall_seconds` is set by the caller.
SweepOutput run_sweep(const RunConfig& cfg, int workers);

// One row per single point of `recipe` for the given inputs; used by the
// single-point CLI subcommands.
Table evaluate_point(const RunConfig& cfg, const SweepPoint& point);

struct OptimumRow {
    std::vector<std::pair<std::string, std::string>> key; // grouping inputs (envelope, te_periods, ...)
    std::string quantity;
    std::string contribution; // dynamic | total
    double phStar{0};
    double valueStar{0};
    bool boundary{false};
    int points{0};
};

// Argmax over ph of `quantity` per group of the remaining varying inputs,
// refined by a parabola through the discrete maximum and its neighbours.
std::vector<OptimumRow> optimum_trace(const Table& dataset, const std::string& quantity);

Table optimum_table(const std::vector<OptimumRow>& rows);

} // namespace qhe
