// oracle.hpp: Direct propagation of the counting-field master equation; the
// scaled CGF is the long-time slope of ln⟨1̆|ρ(λ,t)⟩

#pragma once

#include <optional>
#include <vector>

#include "qhe/model.hpp"

namespace qhe {

struct OracleOptions {
    Variant variant{Variant::FixDiagonal};
    int periods{100};      // K, at least 50
    int max_periods{800};
    double rtol{1e-10};
    double atol{1e-14};
    // Largest allowed deviation of the sampled ln G from its linear fit over
    // the last K/2 periods, relative to the span of the fitted line.
    double residual_tol{1e-7};
    double phase{0.0}; // start time; samples fall at phase + k·t_p
    std::optional<Eigen::Matrix<double, kDim, 1>> rho0{};
};

struct PropagationResult {
    std::vector<double> lnG; // ln⟨1̆|ρ⟩ after each period, lnG[0] = 0 at the start
    double sEstimate{0};
    double fitResidual{0};   // max |lnG − fit| over the fitted window
    int periods{0};
    long steps{0};
    long rejected{0};
    double lastStep{0};
    double maxErrorEstimate{0}; // largest accepted local error norm
    bool frozenEnvelope{false};
    bool transientWarning{false}; // fit residual still above tolerance at max_periods
};

// Uniform populations, zero coherence.
Eigen::Matrix<double, kDim, 1> uniform_state();

// Non-constant envelopes are replaced by their frozen snapshot, since the
// generator is otherwise not periodic from one period to the next.
PropagationResult propagate_cgf(const EngineParams& params, const DrivingSpec& spec, double lambda,
                                const OracleOptions& opts = {});

} // namespace qhe
