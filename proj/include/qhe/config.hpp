// config.hpp: JSON run configuration: engine, driving, numerics and sweep axes

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qhe/oracle.hpp"
#include "qhe/thermo.hpp"

namespace qhe {

enum class Recipe { FluxNoise, Emp, Tur, Cgf, OracleCheck };

std::string_view to_string(Recipe r);
Recipe parse_recipe(std::string_view name);

inline constexpr std::size_t kMaxSweepPoints = 1'000'000;

// One named axis. Numeric axes fill `values`; the envelope axis fills `labels`.
struct Axis {
    std::string name;
    std::vector<double> values;
    std::vector<std::string> labels;

    std::size_t size() const { return labels.empty() ? values.size() : labels.size(); }
    bool categorical() const { return !labels.empty(); }
};

struct SweepSpec {
    Recipe recipe{Recipe::FluxNoise};
    std::vector<Axis> axes;
    std::string output{"sweep.csv"};

    std::size_t points() const;
};

struct NumericsConfig {
    CumulantOptions cumulants{};
    TcConvention tc{TcConvention::PeriodAverage};
    Contribution contribution{Contribution::Total};
    EmpOptions emp{};
    OracleOptions oracle{};
    std::vector<double> lambdas{-0.1, -0.05, 0.05, 0.1}; // cgf / oracle-check when no lambda axis
    int workers{1};

    ThermoOptions thermo() const;
    EmpOptions emp_options() const;
};

struct RunConfig {
    EngineParams engine{};
    DrivingSpec driving{};
    std::optional<double> te_periods{}; // overrides driving.te once ω is known
    std::optional<double> etaC{};       // overrides driving.Th0
    NumericsConfig numerics{};
    SweepSpec sweep{};
};

// Names accepted as axes: every EngineParams and DrivingSpec field, plus
// te_periods (t_e in units of t_p), etaC (sets Th0 = Tc0/(1 − η_c)) and lambda.
bool is_axis_name(std::string_view name);

// Throws ConfigError on unknown keys, wrong types or invariant violations.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

// Grid point resolved from axis indices (first axis varies slowest).
struct SweepPoint {
    std::size_t index{0};
    EngineParams engine{};
    DrivingSpec driving{};
    double lambda{0};
    std::vector<std::size_t> axis_index;
};

// With validate = false the axis values are applied but the invariants are
// not checked, so rows for invalid points can still echo their inputs.
SweepPoint resolve_point(const RunConfig& cfg, std::size_t index, bool validate = true);

} // namespace qhe
