// config.cpp: Strict JSON ingestion of run configurations

#include "qhe/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qhe {

using nlohmann::json;

std::string_view to_string(Recipe r)
{
    switch (r) {
    case Recipe::FluxNoise: return "flux-noise";
    case Recipe::Emp: return "emp";
    case Recipe::Tur: return "tur";
    case Recipe::Cgf: return "cgf";
    case Recipe::OracleCheck: return "oracle-check";
    }
    return "flux-noise";
}

Recipe parse_recipe(std::string_view name)
{
    if (name == "flux-noise") return Recipe::FluxNoise;
    if (name == "emp") return Recipe::Emp;
    if (name == "tur") return Recipe::Tur;
    if (name == "cgf") return Recipe::Cgf;
    if (name == "oracle-check") return Recipe::OracleCheck;
    throw ConfigError("unknown recipe '" + std::string(name) + "' (flux-noise, emp, tur, cgf, oracle-check)");
}

std::size_t SweepSpec::points() const
{
    std::size_t n = 1;
    for (const auto& a : axes) {
        if (a.size() == 0) return 0;
        if (n > kMaxSweepPoints / a.size()) return kMaxSweepPoints + 1;
        n *= a.size();
    }
    return n;
}

ThermoOptions NumericsConfig::thermo() const
{
    ThermoOptions t;
    t.cumulants = cumulants;
    t.tc = tc;
    t.contribution = contribution;
    return t;
}

EmpOptions NumericsConfig::emp_options() const
{
    EmpOptions e = emp;
    e.thermo = thermo();
    return e;
}

namespace {

using Setter = std::function<void(RunConfig&, double)>;

const std::map<std::string, Setter, std::less<>>& engine_fields()
{
    static const std::map<std::string, Setter, std::less<>> m = {
        {"E1", [](RunConfig& c, double v) { c.engine.E1 = v; }},
        {"E2", [](RunConfig& c, double v) { c.engine.E2 = v; }},
        {"Eb", [](RunConfig& c, double v) { c.engine.Eb = v; }},
        {"Ea", [](RunConfig& c, double v) { c.engine.Ea = v; }},
        {"r1h", [](RunConfig& c, double v) { c.engine.r1h = v; }},
        {"r2h", [](RunConfig& c, double v) { c.engine.r2h = v; }},
        {"r1c", [](RunConfig& c, double v) { c.engine.r1c = v; }},
        {"r2c", [](RunConfig& c, double v) { c.engine.r2c = v; }},
        {"r", [](RunConfig& c, double v) { c.engine.r1h = c.engine.r2h = c.engine.r1c = c.engine.r2c = v; }},
        {"g", [](RunConfig& c, double v) { c.engine.g = v; }},
        {"tau", [](RunConfig& c, double v) { c.engine.tau = v; }},
        {"ph", [](RunConfig& c, double v) { c.engine.ph = v; }},
        {"pc", [](RunConfig& c, double v) { c.engine.pc = v; }},
        {"tl", [](RunConfig& c, double v) { c.engine.tl = v; }},
    };
    return m;
}

const std::map<std::string, Setter, std::less<>>& driving_fields()
{
    static const std::map<std::string, Setter, std::less<>> m = {
        {"Tc0", [](RunConfig& c, double v) { c.driving.Tc0 = v; }},
        {"Th0", [](RunConfig& c, double v) { c.driving.Th0 = v; }},
        {"A0", [](RunConfig& c, double v) { c.driving.A0 = v; }},
        {"omega", [](RunConfig& c, double v) { c.driving.omega = v; }},
        {"phi", [](RunConfig& c, double v) { c.driving.phi = v; }},
        {"te", [](RunConfig& c, double v) {
             c.driving.te = v;
             c.te_periods.reset();
         }},
        {"center", [](RunConfig& c, double v) { c.driving.center = v; }},
        {"te_periods", [](RunConfig& c, double v) { c.te_periods = v; }},
        {"etaC", [](RunConfig& c, double v) { c.etaC = v; }},
    };
    return m;
}

double number(const json& v, const std::string& where)
{
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

std::string text(const json& v, const std::string& where)
{
    if (!v.is_string()) throw ConfigError(where + " must be a string");
    return v.get<std::string>();
}

int integer(const json& v, const std::string& where)
{
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& where)
{
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, where));
    return out;
}

void require_object(const json& v, const std::string& where)
{
    if (!v.is_object()) throw ConfigError(where + " must be an object");
}

// Parameter-level errors surface as configuration errors at load time.
template <class F>
void translate(const std::string& where, F&& f)
{
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

void parse_engine(const json& j, RunConfig& cfg)
{
    require_object(j, "engine");
    for (const auto& [key, value] : j.items()) {
        const auto it = engine_fields().find(key);
        if (it == engine_fields().end()) throw ConfigError("engine: unknown key '" + key + "'");
        it->second(cfg, number(value, "engine." + key));
    }
}

void parse_driving(const json& j, RunConfig& cfg)
{
    require_object(j, "driving");
    for (const auto& [key, value] : j.items()) {
        if (key == "envelope") {
            translate("driving.envelope", [&] { cfg.driving.envelope = parse_envelope(text(value, "driving.envelope")); });
            continue;
        }
        const auto it = driving_fields().find(key);
        if (it == driving_fields().end()) throw ConfigError("driving: unknown key '" + key + "'");
        it->second(cfg, number(value, "driving." + key));
    }
}

void parse_numerics(const json& j, RunConfig& cfg)
{
    require_object(j, "numerics");
    NumericsConfig& n = cfg.numerics;
    CgfOptions& c = n.cumulants.cgf;
    for (const auto& [key, value] : j.items()) {
        const std::string where = "numerics." + key;
        translate(where, [&] {
            if (key == "variant") c.variant = parse_variant(text(value, where));
            else if (key == "quad_n") c.quadrature.start_nodes = integer(value, where);
            else if (key == "max_nodes") c.quadrature.max_nodes = integer(value, where);
            else if (key == "quad_order") c.quadrature.order = integer(value, where);
            else if (key == "quad_rel_tol") c.quadrature.rel_tol = number(value, where);
            else if (key == "quad_abs_tol") c.quadrature.abs_tol = number(value, where);
            else if (key == "loop_policy") c.loop = parse_loop_policy(text(value, where));
            else if (key == "consistency_nodes") c.consistency_nodes = integer(value, where);
            else if (key == "lambda_step") n.cumulants.h = number(value, where);
            else if (key == "lambda_floor") n.cumulants.h_floor = number(value, where);
            else if (key == "lambda_rel_agreement") n.cumulants.rel_agreement = number(value, where);
            else if (key == "tc_convention") n.tc = parse_tc_convention(text(value, where));
            else if (key == "contribution") n.contribution = parse_contribution(text(value, where));
            else if (key == "workers") n.workers = integer(value, where);
            else if (key == "lambdas") n.lambdas = numbers(value, where);
            else if (key == "emp_scan_nodes") n.emp.scan_nodes = integer(value, where);
            else if (key == "emp_tolerance") n.emp.tolerance = number(value, where);
            else if (key == "emp_margin") n.emp.margin = number(value, where);
            else if (key == "oracle_periods") n.oracle.periods = integer(value, where);
            else if (key == "oracle_max_periods") n.oracle.max_periods = integer(value, where);
            else if (key == "oracle_rtol") n.oracle.rtol = number(value, where);
            else throw ConfigError("numerics: unknown key '" + key + "'");
        });
    }
    c.quadrature.max_nodes = std::max(c.quadrature.max_nodes, c.quadrature.start_nodes);
    if (c.quadrature.start_nodes < 33) throw ConfigError("numerics.quad_n must be at least 33");
    if (!(n.cumulants.h > 0)) throw ConfigError("numerics.lambda_step must be positive");
    if (n.workers < 1) throw ConfigError("numerics.workers must be at least 1");
    n.oracle.variant = c.variant;
}

std::vector<double> linspace(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() != 3) throw ConfigError(where + " must be [start, stop, count]");
    const double a = number(v[0], where), b = number(v[1], where);
    const int n = integer(v[2], where);
    if (n < 1) throw ConfigError(where + " count must be positive");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

void parse_sweep(const json& j, RunConfig& cfg)
{
    require_object(j, "sweep");
    for (const auto& [key, value] : j.items()) {
        if (key == "recipe") cfg.sweep.recipe = parse_recipe(text(value, "sweep.recipe"));
        else if (key == "output") cfg.sweep.output = text(value, "sweep.output");
        else if (key == "axes") {
            if (!value.is_array()) throw ConfigError("sweep.axes must be an array");
            std::set<std::string> seen;
            for (const auto& a : value) {
                require_object(a, "sweep.axes[]");
                Axis axis;
                axis.name = text(a.value("name", json()), "sweep.axes[].name");
                const std::string where = "sweep.axes[" + axis.name + "]";
                if (!is_axis_name(axis.name)) throw ConfigError(where + ": unknown axis name");
                if (!seen.insert(axis.name).second) throw ConfigError(where + ": duplicate axis");
                for (const auto& [k, _] : a.items()) {
                    if (k != "name" && k != "values" && k != "linspace") {
                        throw ConfigError(where + ": unknown key '" + k + "'");
                    }
                }
                if (a.contains("values") == a.contains("linspace")) {
                    throw ConfigError(where + ": give exactly one of values or linspace");
                }
                if (axis.name == "envelope") {
                    if (!a.contains("values") || !a["values"].is_array()) {
                        throw ConfigError(where + ": values must be an array of envelope names");
                    }
                    for (const auto& v : a["values"]) {
                        const std::string label = text(v, where);
                        translate(where, [&] { parse_envelope(label); });
                        axis.labels.push_back(label);
                    }
                } else {
                    axis.values = a.contains("values") ? numbers(a["values"], where + ".values")
                                                       : linspace(a["linspace"], where + ".linspace");
                }
                if (axis.size() == 0) throw ConfigError(where + ": axis is empty");
                cfg.sweep.axes.push_back(std::move(axis));
            }
        } else {
            throw ConfigError("sweep: unknown key '" + key + "'");
        }
    }
    if (cfg.sweep.points() > kMaxSweepPoints) throw ConfigError("sweep grid exceeds 1e6 points");
}

} // namespace

bool is_axis_name(std::string_view name)
{
    return name == "envelope" || name == "lambda" || engine_fields().count(name) || driving_fields().count(name);
}

RunConfig parse_config(const json& doc)
{
    require_object(doc, "configuration");
    RunConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "engine") parse_engine(value, cfg);
        else if (key == "driving") parse_driving(value, cfg);
        else if (key == "numerics") parse_numerics(value, cfg);
        else if (key == "sweep") parse_sweep(value, cfg);
        else throw ConfigError("unknown top-level key '" + key + "'");
    }
    translate("engine", [&] { cfg.engine.validate(); });
    translate("driving", [&] { resolve_point(cfg, 0); });
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open configuration '" + path + "'");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("configuration '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& cfg)
{
    const EngineParams& e = cfg.engine;
    const DrivingSpec& d = cfg.driving;
    const NumericsConfig& n = cfg.numerics;
    const CgfOptions& c = n.cumulants.cgf;
    json j;
    j["engine"] = {{"E1", e.E1}, {"E2", e.E2}, {"Eb", e.Eb}, {"Ea", e.Ea}, {"r1h", e.r1h}, {"r2h", e.r2h},
                   {"r1c", e.r1c}, {"r2c", e.r2c}, {"g", e.g},   {"tau", e.tau}, {"ph", e.ph},   {"pc", e.pc},
                   {"tl", e.tl}};
    j["driving"] = {{"Tc0", d.Tc0},     {"Th0", d.Th0},
                    {"A0", d.A0},       {"omega", d.omega},
                    {"phi", d.phi},     {"envelope", std::string(to_string(d.envelope))},
                    {"te", d.te},       {"center", d.center}};
    if (cfg.te_periods) j["driving"]["te_periods"] = *cfg.te_periods;
    if (cfg.etaC) j["driving"]["etaC"] = *cfg.etaC;
    j["numerics"] = {{"variant", std::string(to_string(c.variant))},
                     {"quad_n", c.quadrature.start_nodes},
                     {"max_nodes", c.quadrature.max_nodes},
                     {"quad_order", c.quadrature.order},
                     {"quad_rel_tol", c.quadrature.rel_tol},
                     {"quad_abs_tol", c.quadrature.abs_tol},
                     {"loop_policy", std::string(to_string(c.loop))},
                     {"consistency_nodes", c.consistency_nodes},
                     {"lambda_step", n.cumulants.h},
                     {"lambda_floor", n.cumulants.h_floor},
                     {"lambda_rel_agreement", n.cumulants.rel_agreement},
                     {"tc_convention", std::string(to_string(n.tc))},
                     {"contribution", std::string(to_string(n.contribution))},
                     {"workers", n.workers},
                     {"lambdas", n.lambdas},
                     {"emp_scan_nodes", n.emp.scan_nodes},
                     {"emp_tolerance", n.emp.tolerance},
                     {"emp_margin", n.emp.margin},
                     {"oracle_periods", n.oracle.periods},
                     {"oracle_max_periods", n.oracle.max_periods},
                     {"oracle_rtol", n.oracle.rtol}};
    json axes = json::array();
    for (const auto& a : cfg.sweep.axes) {
        if (a.categorical()) axes.push_back({{"name", a.name}, {"values", a.labels}});
        else axes.push_back({{"name", a.name}, {"values", a.values}});
    }
    j["sweep"] = {{"recipe", std::string(to_string(cfg.sweep.recipe))}, {"output", cfg.sweep.output}, {"axes", axes}};
    return j;
}

SweepPoint resolve_point(const RunConfig& cfg, std::size_t index, bool validate)
{
    const std::size_t total = cfg.sweep.points();
    if (index >= std::max<std::size_t>(total, 1)) throw ConfigError("sweep point index out of range");
    RunConfig c = cfg;
    SweepPoint p;
    p.index = index;
    p.axis_index.resize(cfg.sweep.axes.size());
    std::size_t rest = index;
    for (std::size_t k = cfg.sweep.axes.size(); k-- > 0;) {
        const std::size_t n = cfg.sweep.axes[k].size();
        p.axis_index[k] = rest % n;
        rest /= n;
    }
    for (std::size_t k = 0; k < cfg.sweep.axes.size(); ++k) {
        const Axis& a = cfg.sweep.axes[k];
        const std::size_t i = p.axis_index[k];
        if (a.name == "envelope") c.driving.envelope = parse_envelope(a.labels[i]);
        else if (a.name == "lambda") p.lambda = a.values[i];
        else if (const auto e = engine_fields().find(a.name); e != engine_fields().end()) e->second(c, a.values[i]);
        else driving_fields().at(a.name)(c, a.values[i]);
    }
    if (c.etaC) {
        const double eta = *c.etaC;
        if (validate && !(eta > 0 && eta < 1)) throw ParameterError("etaC must lie in (0, 1)");
        c.driving.Th0 = c.driving.Tc0 / (1 - eta);
    }
    if (c.te_periods) {
        if (validate && !(*c.te_periods > 0)) throw ParameterError("te_periods must be positive");
        c.driving.te = *c.te_periods * c.driving.period();
    }
    if (validate) {
        c.engine.validate();
        c.driving.validate();
    }
    p.engine = c.engine;
    p.driving = c.driving;
    return p;
}

} // namespace qhe
