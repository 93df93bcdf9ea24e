// thermo.hpp: Work, power, efficiency at maximum power, affinity and the TUR ratio

#pragma once

#include <string_view>
#include <vector>

#include "qhe/fcs.hpp"

namespace qhe {

// Which flux enters P = W·j.
enum class Contribution { Dynamic, Total };

std::string_view to_string(Contribution c);
Contribution parse_contribution(std::string_view name);

// Cold temperature used in the TUR denominator.
enum class TcConvention {
    PeriodAverage, // (1/t_p)∫T_c dt; equals Tc0 for the Constant envelope
    Base,          // Tc0
};

std::string_view to_string(TcConvention c);
TcConvention parse_tc_convention(std::string_view name);

struct ThermoOptions {
    CumulantOptions cumulants{};
    Contribution contribution{Contribution::Total};
    TcConvention tc{TcConvention::PeriodAverage};
};

// (1/t_p) ∫ T_c dt
double mean_cold_temperature(const DrivingSpec& spec, const QuadratureOptions& quad = {});

// W = Ea − Eb + ln((1+n_l)/n_l) · (1/t_p)∫T_c dt
double work(const EngineParams& params, const DrivingSpec& spec, const QuadratureOptions& quad = {});

inline double power(double W, double j) { return W * j; }

// η = W / (Ea − E1)
double efficiency(const EngineParams& params, double W);

// 𝒜 = ln[ñ_l ∫(1+n_c)n_h dt / (n_l ∫n_c(1+n_h) dt)]
double affinity(const EngineParams& params, const DrivingSpec& spec, const QuadratureOptions& quad = {});

struct TurValues {
    double gamma;
    double ratio;        // γ/η
    double entropy_rate; // Σ̇ = j𝒜
};

// γ = η_c P / (P + T_c 𝒜 j)
TurValues tur(double etaC, double P, double eta, double A, double j, double Tc);

struct ThermoReport {
    double W{0};
    double P{0};
    double eta{0};
    double etaC{0};
    double affinity{0};
    double entropyRate{0};
    double gamma{0};
    double turRatio{0};
    double Tc{0}; // temperature used in γ
    double j{0};  // flux used in P
    CumulantSet cumulants{};
};

ThermoReport thermo_report(const EngineParams& params, const DrivingSpec& spec, const ThermoOptions& opts = {});

// Convenience wrappers that compute the cumulants internally.
double power(const EngineParams& params, const DrivingSpec& spec, const ThermoOptions& opts = {});
TurValues tur_ratio(const EngineParams& params, const DrivingSpec& spec, const ThermoOptions& opts = {});

struct EmpOptions {
    ThermoOptions thermo{};
    double margin{1e-3}; // Eb ∈ [E1 + margin, Ea − margin]
    int scan_nodes{64};
    double tolerance{1e-6};
};

struct EmpResult {
    double ebStar{0};
    double etaStar{0};
    double pStar{0};
    double ebLow{0};
    double ebHigh{0};
    int evaluations{0};
    int localMaxima{0}; // interior local maxima seen in the coarse scan
    bool boundary{false};
};

EmpResult emp(const EngineParams& params, const DrivingSpec& spec, const EmpOptions& opts = {});

struct LinearFit {
    double slope{0};
    double intercept{0};
    double slopeSe{0};
    double interceptSe{0};
    int points{0};
};

// Ordinary least squares with standard errors; needs at least three points.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct CarnotPoint {
    double etaC{0};
    double Th0{0};
    EmpResult emp{};
};

struct CarnotSweep {
    std::vector<CarnotPoint> points;
    LinearFit fit{};
};

// For each η_c, Th0 = Tc0/(1 − η_c) at fixed Tc0; η* from emp; fit η* vs η_c.
CarnotSweep carnot_sweep(const EngineParams& params, const DrivingSpec& spec, const std::vector<double>& etaCs,
                         const EmpOptions& opts = {}, int workers = 1);

} // namespace qhe
