// sweep.cpp: Recipe evaluation over parameter grids

#include "qhe/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qhe/parallel.hpp"

#ifndef QHE_VERSION
#define QHE_VERSION "dev"
#endif

namespace qhe {

using nlohmann::json;

const std::vector<std::string>& input_columns()
{
    static const std::vector<std::string> cols = {
        "point", "E1",  "E2",    "Eb",  "Ea",       "r1h", "r2h",        "r1c",    "r2c",  "g",      "tau",
        "ph",    "pc",  "tl",    "Tc0", "Th0",      "A0",  "omega",      "phi",    "envelope", "te", "te_periods",
        "center", "etaC", "lambda", "variant"};
    return cols;
}

namespace {

const std::vector<std::string>& output_columns(Recipe r)
{
    static const std::map<Recipe, std::vector<std::string>> cols = {
        {Recipe::FluxNoise,
         {"jd", "jg", "nd", "ng", "j", "n", "lambda_step", "nodes", "closure_defect", "consistency_defect",
          "min_gap", "nd_positive"}},
        {Recipe::Tur,
         {"jd", "jg", "j_used", "W", "P", "eta", "affinity", "entropy_rate", "gamma", "tur_ratio", "Tc_used",
          "contribution"}},
        {Recipe::Emp, {"eb_star", "eta_star", "p_star", "boundary", "local_maxima", "evaluations", "contribution"}},
        {Recipe::Cgf, {"sd", "sg", "s", "nodes", "sd_error", "sg_error", "closure_defect"}},
        {Recipe::OracleCheck,
         {"s_oracle", "sd", "sg", "s", "rel_err_total", "rel_err_dynamic", "periods", "fit_residual",
          "frozen_envelope", "transient_warning"}},
    };
    return cols.at(r);
}

std::vector<std::string> header(Recipe r)
{
    std::vector<std::string> h = input_columns();
    const auto& out = output_columns(r);
    h.insert(h.end(), out.begin(), out.end());
    h.push_back("error");
    return h;
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::string integer(long n) { return std::to_string(n); }

std::vector<std::string> echo(const RunConfig& cfg, const SweepPoint& p)
{
    const EngineParams& e = p.engine;
    const DrivingSpec& d = p.driving;
    const auto f = format_number;
    return {integer(static_cast<long>(p.index)),
            f(e.E1), f(e.E2), f(e.Eb), f(e.Ea), f(e.r1h), f(e.r2h), f(e.r1c), f(e.r2c), f(e.g), f(e.tau),
            f(e.ph), f(e.pc), f(e.tl),
            f(d.Tc0), f(d.Th0), f(d.A0), f(d.omega), f(d.phi), std::string(to_string(d.envelope)), f(d.te),
            f(d.te / d.period()), f(d.center), f(d.carnot_efficiency()), f(p.lambda),
            std::string(to_string(cfg.numerics.cumulants.cgf.variant))};
}

std::vector<std::string> outputs(const RunConfig& cfg, const SweepPoint& p)
{
    const NumericsConfig& n = cfg.numerics;
    const auto f = format_number;
    switch (cfg.sweep.recipe) {
    case Recipe::FluxNoise: {
        const CumulantSet c = cumulants(p.engine, p.driving, n.cumulants);
        return {f(c.jd), f(c.jg), f(c.nd), f(c.ng), f(c.j()), f(c.n()), f(c.h), integer(c.centre.nodes),
                f(c.centre.closure_defect), f(c.centre.consistency_defect), f(c.centre.min_gap),
                flag(c.nd_positive())};
    }
    case Recipe::Tur: {
        const ThermoReport r = thermo_report(p.engine, p.driving, n.thermo());
        return {f(r.cumulants.jd), f(r.cumulants.jg), f(r.j),        f(r.W),     f(r.P),
                f(r.eta),          f(r.affinity),     f(r.entropyRate), f(r.gamma), f(r.turRatio),
                f(r.Tc),           std::string(to_string(n.contribution))};
    }
    case Recipe::Emp: {
        const EmpResult r = emp(p.engine, p.driving, n.emp_options());
        return {f(r.ebStar),         f(r.etaStar),          f(r.pStar), flag(r.boundary), integer(r.localMaxima),
                integer(r.evaluations), std::string(to_string(n.contribution))};
    }
    case Recipe::Cgf: {
        const CgfResult r = cgf(p.engine, p.driving, p.lambda, n.cumulants.cgf);
        return {f(r.sd), f(r.sg), f(r.total()), integer(r.nodes), f(r.sd_error), f(r.sg_error),
                f(r.closure_defect)};
    }
    case Recipe::OracleCheck: {
        const PropagationResult o = propagate_cgf(p.engine, p.driving, p.lambda, n.oracle);
        // The adiabatic side sees the same frozen generator as the propagation.
        const DrivingSpec d = o.frozenEnvelope ? frozen_envelope(p.driving) : p.driving;
        const CgfResult r = cgf(p.engine, d, p.lambda, n.cumulants.cgf);
        const double s = o.sEstimate;
        return {f(s),
                f(r.sd),
                f(r.sg),
                f(r.total()),
                f(std::abs(r.total() - s) / std::abs(s)),
                f(std::abs(r.sd - s) / std::abs(s)),
                integer(o.periods),
                f(o.fitResidual),
                flag(o.frozenEnvelope),
                flag(o.transientWarning)};
    }
    }
    return {};
}

std::string single_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

std::vector<std::string> row_for(const RunConfig& cfg, std::size_t index)
{
    const std::size_t width = output_columns(cfg.sweep.recipe).size();
    SweepPoint p;
    std::string error;
    std::vector<std::string> row;
    try {
        p = resolve_point(cfg, index);
        row = echo(cfg, p);
        auto out = outputs(cfg, p);
        row.insert(row.end(), out.begin(), out.end());
        row.emplace_back();
        return row;
    } catch (const std::exception& e) {
        error = single_line(e.what());
    }
    if (row.empty()) row = echo(cfg, resolve_point(cfg, index, false));
    row.resize(input_columns().size());
    row.resize(row.size() + width);
    row.push_back(error);
    return row;
}

RunConfig with_lambda_axis(const RunConfig& cfg)
{
    const bool wants_lambda = cfg.sweep.recipe == Recipe::Cgf || cfg.sweep.recipe == Recipe::OracleCheck;
    const bool has_lambda = std::any_of(cfg.sweep.axes.begin(), cfg.sweep.axes.end(),
                                        [](const Axis& a) { return a.name == "lambda"; });
    if (has_lambda && !wants_lambda) {
        throw ConfigError("a lambda axis is only meaningful for the cgf and oracle-check recipes");
    }
    RunConfig out = cfg;
    if (wants_lambda && !has_lambda) {
        if (cfg.numerics.lambdas.empty()) throw ConfigError("numerics.lambdas is empty");
        out.sweep.axes.push_back({"lambda", cfg.numerics.lambdas, {}});
    }
    return out;
}

json emp_fits(const RunConfig& cfg, const Table& table)
{
    json fits = json::array();
    const auto& axes = cfg.sweep.axes;
    const auto eta_axis = std::find_if(axes.begin(), axes.end(), [](const Axis& a) { return a.name == "etaC"; });
    if (eta_axis == axes.end()) return fits;
    const std::size_t ka = static_cast<std::size_t>(eta_axis - axes.begin());

    std::map<std::vector<std::size_t>, std::pair<std::vector<double>, std::vector<double>>> groups;
    const int ce = table.column("etaC"), cs = table.column("eta_star"), cerr = table.column("error");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const SweepPoint p = resolve_point(cfg, i, false);
        std::vector<std::size_t> key = p.axis_index;
        key.erase(key.begin() + static_cast<long>(ka));
        auto& g = groups[key];
        const auto& row = table.rows[i];
        if (!row[cerr].empty()) continue;
        g.first.push_back(std::stod(row[ce]));
        g.second.push_back(std::stod(row[cs]));
    }
    for (const auto& [key, xy] : groups) {
        json entry;
        json group = json::object();
        std::size_t j = 0;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            if (k == ka) continue;
            const Axis& a = axes[k];
            if (a.categorical()) group[a.name] = a.labels[key[j]];
            else group[a.name] = a.values[key[j]];
            ++j;
        }
        entry["group"] = group;
        entry["points"] = xy.first.size();
        if (xy.first.size() >= 3) {
            const LinearFit fit = fit_line(xy.first, xy.second);
            entry["slope"] = fit.slope;
            entry["intercept"] = fit.intercept;
            entry["slope_se"] = fit.slopeSe;
            entry["intercept_se"] = fit.interceptSe;
        } else {
            entry["error"] = "fewer than three successful points";
        }
        fits.push_back(entry);
    }
    return fits;
}

} // namespace

Table evaluate_point(const RunConfig& cfg, const SweepPoint& point)
{
    Table t;
    t.header = header(cfg.sweep.recipe);
    std::vector<std::string> row = echo(cfg, point);
    auto out = outputs(cfg, point);
    row.insert(row.end(), out.begin(), out.end());
    row.emplace_back();
    t.rows.push_back(std::move(row));
    return t;
}

SweepOutput run_sweep(const RunConfig& cfg_in, int workers)
{
    const RunConfig cfg = with_lambda_axis(cfg_in);
    const std::size_t n = cfg.sweep.points();
    if (n > kMaxSweepPoints) throw ConfigError("sweep grid exceeds 1e6 points");

    SweepOutput out;
    out.table.header = header(cfg.sweep.recipe);
    out.table.rows.resize(n);
    parallel_for(n, workers, [&](std::size_t i) { out.table.rows[i] = row_for(cfg, i); });

    std::size_t failures = 0;
    const int cerr = out.table.column("error");
    for (const auto& row : out.table.rows) failures += row[cerr].empty() ? 0 : 1;

    const CgfOptions& c = cfg.numerics.cumulants.cgf;
    json& m = out.manifest;
    m["version"] = QHE_VERSION;
    m["recipe"] = std::string(to_string(cfg.sweep.recipe));
    m["variant"] = std::string(to_string(c.variant));
    m["quadrature"] = {{"rule", "composite Gauss-Legendre"},
                       {"start_nodes", c.quadrature.start_nodes},
                       {"max_nodes", c.quadrature.max_nodes},
                       {"order", c.quadrature.order},
                       {"rel_tol", c.quadrature.rel_tol},
                       {"abs_tol", c.quadrature.abs_tol}};
    m["lambda_stencil"] = {{"points", 5},
                           {"h", cfg.numerics.cumulants.h},
                           {"h_floor", cfg.numerics.cumulants.h_floor},
                           {"rel_agreement", cfg.numerics.cumulants.rel_agreement}};
    m["loop_policy"] = std::string(to_string(c.loop));
    m["points"] = n;
    m["failures"] = failures;
    m["workers"] = workers;
    m["config"] = to_json(cfg);
    if (cfg.sweep.recipe == Recipe::Emp) m["fits"] = emp_fits(cfg, out.table);
    return out;
}

namespace {

std::string contribution_of(const std::string& quantity)
{
    if (quantity == "jd" || quantity == "nd") return "dynamic";
    if (quantity == "jg" || quantity == "ng") return "geometric";
    return "total";
}

} // namespace

std::vector<OptimumRow> optimum_trace(const Table& dataset, const std::string& quantity)
{
    const int cph = dataset.column("ph");
    const int cq = dataset.column(quantity);
    const int cerr = dataset.column("error");
    if (cph < 0) throw ConfigError("dataset has no ph column");
    if (cq < 0) throw ConfigError("dataset has no column '" + quantity + "'");

    // Group by every other input column that varies across the dataset.
    std::vector<int> keys;
    for (const auto& name : input_columns()) {
        if (name == "ph" || name == "point") continue;
        const int c = dataset.column(name);
        if (c < 0) continue;
        bool varies = false;
        for (const auto& row : dataset.rows) varies = varies || row[c] != dataset.rows.front()[c];
        if (varies) keys.push_back(c);
    }

    std::vector<std::vector<std::string>> order;
    std::map<std::vector<std::string>, std::vector<std::pair<double, double>>> groups;
    for (const auto& row : dataset.rows) {
        if (cerr >= 0 && !row[cerr].empty()) continue;
        std::vector<std::string> key;
        for (int c : keys) key.push_back(row[c]);
        if (!groups.count(key)) order.push_back(key);
        groups[key].emplace_back(std::stod(row[cph]), std::stod(row[cq]));
    }

    std::vector<OptimumRow> out;
    for (const auto& key : order) {
        auto pts = groups[key];
        std::sort(pts.begin(), pts.end());
        OptimumRow r;
        for (std::size_t k = 0; k < keys.size(); ++k) r.key.emplace_back(dataset.header[keys[k]], key[k]);
        r.quantity = quantity;
        r.contribution = contribution_of(quantity);
        r.points = static_cast<int>(pts.size());
        std::size_t best = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (pts[i].second > pts[best].second) best = i;
        }
        r.phStar = pts[best].first;
        r.valueStar = pts[best].second;
        if (best == 0 || best + 1 == pts.size()) {
            r.boundary = true;
        } else {
            const auto [x0, y0] = pts[best - 1];
            const auto [x1, y1] = pts[best];
            const auto [x2, y2] = pts[best + 1];
            // Vertex of the parabola through three points.
            const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
            const double a = (d12 - d01) / (x2 - x0);
            if (a < 0) {
                const double b = d01 - a * (x0 + x1);
                r.phStar = -b / (2 * a);
                r.valueStar = y0 + d01 * (r.phStar - x0) + a * (r.phStar - x0) * (r.phStar - x1);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

Table optimum_table(const std::vector<OptimumRow>& rows)
{
    Table t;
    if (!rows.empty()) {
        for (const auto& [name, _] : rows.front().key) t.header.push_back(name);
    }
    for (const char* c : {"quantity", "contribution", "ph_star", "value_star", "boundary", "points"}) {
        t.header.emplace_back(c);
    }
    for (const auto& r : rows) {
        std::vector<std::string> row;
        for (const auto& kv : r.key) row.push_back(kv.second);
        row.push_back(r.quantity);
        row.push_back(r.contribution);
        row.push_back(format_number(r.phStar));
        row.push_back(format_number(r.valueStar));
        row.push_back(r.boundary ? "1" : "0");
        row.push_back(std::to_string(r.points));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace qhe
