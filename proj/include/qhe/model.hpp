// model.hpp: Engine and driving parameters, bath occupations and the
// counting-field Liouvillian of the four-level heat engine

#pragma once

#include <numbers>
#include <string>
#include <string_view>

#include "qhe/types.hpp"

namespace qhe {

// Static engine constants in atomic units (k_B = ħ = 1).
struct EngineParams {
    double E1{0.1};
    double E2{0.1}; // degenerate partner of E1; kept for completeness, not used by the rates
    double Eb{0.4};
    double Ea{1.5};

    // system–reservoir couplings r_{ik}, i ∈ {1,2}, k ∈ {h,c}
    double r1h{0.1};
    double r2h{0.1};
    double r1c{0.1};
    double r2c{0.1};

    double g{40.0};   // cavity coupling
    double tau{0.01}; // environmental dephasing
    double ph{0.3};   // hot-bath coherence control
    double pc{0.3};   // cold-bath coherence control
    double tl{2.0};   // cavity temperature

    // Equal system–reservoir coupling on all four channels.
    static EngineParams with_uniform_coupling(double r);

    double rh() const { return r1h + r2h; }
    double rc() const { return r1c + r2c; }

    void validate() const;
};

enum class Envelope { Constant, Gaussian, Lorentzian };

std::string_view to_string(Envelope e);
Envelope parse_envelope(std::string_view name);

// Temperature protocol: T_c(t) = Tc0 + A(t) sin(ωt), T_h(t) = Th0 + A(t) sin(ωt + φ).
struct DrivingSpec {
    double Tc0{1.0};
    double Th0{1.67};
    double A0{0.01};
    double omega{2500.0};
    double phi{std::numbers::pi / 2};
    Envelope envelope{Envelope::Gaussian};
    double te{2 * std::numbers::pi / 2500.0}; // FWHM of the envelope, one period by default
    double center{0.0};

    double period() const { return 2 * std::numbers::pi / omega; }
    double carnot_efficiency() const { return 1.0 - Tc0 / Th0; }

    void validate() const;
};

// Constant-envelope copy with the amplitude frozen at the value the envelope
// takes in the middle of the first period.
DrivingSpec frozen_envelope(const DrivingSpec& spec);

double envelope_value(const DrivingSpec& spec, double t);
double envelope_rate(const DrivingSpec& spec, double t);

struct BathTemperatures {
    double Tc;
    double Th;
};

// Throws ParameterError when T_c ≤ 0 or T_h ≤ T_c at t.
BathTemperatures bath_temperatures(const DrivingSpec& spec, double t);

// Time derivatives (dT_c/dt, dT_h/dt).
BathTemperatures bath_temperature_rates(const DrivingSpec& spec, double t);

struct Occupations {
    Real nc, nh, nl;
    Real ntc, nth, ntl; // n + 1
};

// Bose factor 1/(exp(dE/T) − 1).
Real bose(Real dE, Real T);

Occupations occupations(const EngineParams& params, double Tc, double Th);

// Trace-conservation repair applied to the printed generator.
enum class Variant { AsPrinted, FixDiagonal, FixGain };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct LiouvillianMatrix {
    Mat5 m;
    double lambda{0.0};
    double t{0.0};
    Variant variant{Variant::FixDiagonal};
};

// Generator for given occupations. State ordering {ρ11, ρ22, ρaa, ρbb, Re ρ12};
// λ dresses the cavity entries (3,4) with e^{−λ} and (4,3) with e^{+λ}.
Mat5 liouvillian_from_occupations(const EngineParams& params, Real nc, Real nh, Real nl,
                                  double lambda, Variant variant);

LiouvillianMatrix assemble_liouvillian(const EngineParams& params, const DrivingSpec& spec,
                                       double lambda, double t, Variant variant);

// ∂L/∂t along the protocol. The generator is affine in (n_c, n_h), so this is
// exact: ∂L/∂n_c · ṅ_c + ∂L/∂n_h · ṅ_h.
Mat5 liouvillian_rate(const EngineParams& params, const DrivingSpec& spec,
                      double lambda, double t, Variant variant);

// max_j |Σ_i w_i M_ij| with w = (1,1,1,1,0).
Real left_null_defect(const Mat5& m);

} // namespace qhe
