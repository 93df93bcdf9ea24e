// fcs.hpp: Dynamic and geometric scaled cumulant generating functions over
// one driving period, and the flux/noise cumulants extracted from them

#pragma once

#include <functional>
#include <string_view>

#include "qhe/quadrature.hpp"
#include "qhe/spectral.hpp"

namespace qhe {

// How the geometric integral treats a path whose end point differs from its
// start (finite envelopes centred away from the middle of the window).
enum class LoopPolicy {
    OpenPath,    // integrate along the open path in the trace gauge
    Strict,      // throw OpenLoopError unless the path closes to 1e-8
    JumpClosure, // add the sudden-return term ln⟨L(0)|R(t_p)⟩; gauge invariant
};

std::string_view to_string(LoopPolicy p);
LoopPolicy parse_loop_policy(std::string_view name);

inline constexpr double kClosureTolerance = 1e-8;

struct CgfOptions {
    Variant variant{Variant::FixDiagonal};
    QuadratureOptions quadrature{};
    LoopPolicy loop{LoopPolicy::OpenPath};
    bool geometric{true};
    // Nodes at which ⟨L|Ṙ⟩ from the bordered solve is compared with the
    // finite-difference −⟨L̇|R⟩; 0 disables the check.
    int consistency_nodes{16};
    double consistency_tolerance{1e-6};
    // Test hook: multiplies each tracked triple by a scale before gauge fixing.
    std::function<Real(Real t)> gauge_perturbation{};
};

struct CgfResult {
    double sd{0};
    double sg{0};
    int nodes{0};
    double sd_error{0};
    double sg_error{0};
    double sd_noise{0}; // estimated round-off in sd and sg
    double sg_noise{0};
    double closure_defect{0};     // ‖R(t_p) − R(0)‖ / ‖R(0)‖ in the trace gauge
    double consistency_defect{0}; // max relative mismatch of the two ⟨L|Ṙ⟩ routes
    double min_gap{0};
    bool near_degenerate{false};

    double total() const { return sd + sg; }
};

// S_d(λ) and S_g(λ) evaluated on a shared, tracked quadrature grid.
CgfResult cgf(const EngineParams& params, const DrivingSpec& spec, double lambda, const CgfOptions& opts = {});

// (1/t_p) ∫ ζ(λ,t) dt
double dynamic_cgf(const EngineParams& params, const DrivingSpec& spec, double lambda, const CgfOptions& opts = {});

// −(1/t_p) ∫ ⟨L(λ,t)|Ṙ(λ,t)⟩ dt
double geometric_cgf(const EngineParams& params, const DrivingSpec& spec, double lambda,
                     const CgfOptions& opts = {});

struct CumulantOptions {
    CgfOptions cgf{};
    double h{1e-3};
    double h_floor{1e-5};
    double rel_agreement{1e-5};
    double abs_agreement{1e-10};
};

struct CumulantSet {
    double jd{0};
    double jg{0};
    double nd{0};
    double ng{0};
    double h{0}; // λ step actually used
    CgfResult centre{}; // CGF data at λ = 0

    double j() const { return jd + jg; }
    double n() const { return nd + ng; }
    bool nd_positive() const { return nd > 0; }
};

// First and second λ-derivatives at 0 from the 5-point central stencil,
// validated against a rerun at h/2.
CumulantSet cumulants(const EngineParams& params, const DrivingSpec& spec, const CumulantOptions& opts = {});

} // namespace qhe
