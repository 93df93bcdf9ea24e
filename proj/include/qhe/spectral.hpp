// spectral.hpp: Dominant eigen-triple of the 5×5 generator with gauge fixing
// and continuity tracking along the driving cycle

#pragma once

#include "qhe/model.hpp"

namespace qhe {

// Dominant eigenvalue ζ with right/left eigenvectors normalised so that ⟨L|R⟩ = 1.
struct SpectralTriple {
    Real zeta{0};
    Vec5 R{Vec5::Zero()};
    Vec5 L{Vec5::Zero()};
    double residual_right{0}; // ‖MR − ζR‖ / (‖M‖ ‖R‖)
    double residual_left{0};  // ‖LM − ζL‖ / (‖M‖ ‖L‖)
    double gap{0};            // ζ − Re(subdominant eigenvalue)
    bool near_degenerate{false};
};

enum class Gauge {
    UnitNorm, // ‖R‖ = 1, sign by largest component (or overlap with a hint)
    Trace,    // ⟨1̆|R⟩ = 1; R at λ = 0 is the normalised steady state
};

inline constexpr double kResidualBound = 1e-10;
inline constexpr double kDegeneracyThreshold = 1e-8;

// Eigenvalue of largest real part. Throws SpectralError if that eigenvalue is
// one of a complex-conjugate pair or the residual bounds are violated.
SpectralTriple dominant_triple(const Mat5& m);
SpectralTriple dominant_triple(const LiouvillianMatrix& m);

// Continuity-tracked selection: picks the eigenvector with the largest overlap
// with `hint.R`, then checks it is still the eigenvalue of largest real part
// (SpectralError otherwise). Sign makes the overlap with the hint positive.
SpectralTriple dominant_triple(const Mat5& m, const SpectralTriple& hint);
SpectralTriple dominant_triple(const LiouvillianMatrix& m, const SpectralTriple& hint);

// R → cR, L → L/c.
void rescale(SpectralTriple& triple, Real c);

// Re-express a triple in the requested gauge. For Gauge::UnitNorm the sign is
// kept as is.
SpectralTriple in_gauge(SpectralTriple triple, Gauge gauge);

struct TripleRate {
    Vec5 dR{Vec5::Zero()};
    Vec5 dL{Vec5::Zero()};
    Real dzeta{0};
};

// Exact first-order perturbation of a simple eigen-triple in the trace gauge:
// solves the bordered systems
//   [M − ζ   R] [Ṙ]   [−(Ṁ − ζ̇)R]        [Mᵀ − ζ   R] [L̇]   [−(Ṁ − ζ̇)ᵀL]
//   [ 1̆ᵀ     0] [μ] = [     0     ],      [  Rᵀ     0] [ν] = [  −⟨L|Ṙ⟩   ]
// with ζ̇ = ⟨L|Ṁ|R⟩. `triple` must already be in the trace gauge.
TripleRate triple_rate(const Mat5& m, const Mat5& dm, const SpectralTriple& triple);

struct FiniteDifferenceOptions {
    double h{0};            // 0 selects t_p · 1e-3
    bool richardson{true};  // combine steps h and h/2
    Gauge gauge{Gauge::Trace};
};

// Central-difference estimate of (Ṙ, L̇, ζ̇) at time t, both endpoints matched
// to the gauge of the triple at t.
TripleRate triple_derivative_t(const EngineParams& params, const DrivingSpec& spec, double lambda,
                               double t, Variant variant, const FiniteDifferenceOptions& opts = {});

} // namespace qhe
