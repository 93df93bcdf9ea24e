#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qhe/fcs.hpp"
#include "qhe/oracle.hpp"
#include "qhe/spectral.hpp"

using namespace qhe;

namespace {

DrivingSpec slow_constant()
{
    DrivingSpec s;
    s.envelope = Envelope::Constant;
    s.omega = 25;
    return s;
}

Eigen::Matrix<double, kDim, 1> random_state(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.05, 1);
    Eigen::Matrix<double, kDim, 1> r;
    for (int k = 0; k < 4; ++k) r[k] = u(rng);
    r.head<4>() /= r.head<4>().sum();
    r[4] = u(rng) - 0.5;
    return r;
}

} // namespace

TEST_SUITE("oracle")
{
    TEST_CASE("probability is conserved at zero counting field")
    {
        const PropagationResult r = propagate_cgf(EngineParams{}, slow_constant(), 0.0);
        CHECK(std::abs(r.sEstimate) < 1e-8);
        CHECK(std::abs(r.lnG.back()) < 1e-8);
        CHECK_FALSE(r.transientWarning);
        CHECK(r.steps > 0);
    }

    TEST_CASE("undriven generator: slope is the static eigenvalue")
    {
        DrivingSpec s = slow_constant();
        s.A0 = 0;
        const PropagationResult r = propagate_cgf(EngineParams{}, s, 0.05);
        const SpectralTriple t = dominant_triple(assemble_liouvillian(EngineParams{}, s, 0.05, 0.0, Variant::FixDiagonal));
        CHECK(std::abs(r.sEstimate - static_cast<double>(t.zeta)) < 1e-8);
    }

    TEST_CASE("slope does not depend on the initial state")
    {
        std::mt19937_64 rng(11);
        OracleOptions a, b;
        a.rho0 = random_state(rng);
        b.rho0 = random_state(rng);
        const double sa = propagate_cgf(EngineParams{}, slow_constant(), 0.05, a).sEstimate;
        const double sb = propagate_cgf(EngineParams{}, slow_constant(), 0.05, b).sEstimate;
        CHECK(std::abs(sa - sb) <= 1e-6 * std::abs(sa));
    }

    TEST_CASE("slope does not depend on the sampling phase")
    {
        const DrivingSpec s = slow_constant();
        OracleOptions shifted;
        shifted.phase = s.period() / 2;
        const double a = propagate_cgf(EngineParams{}, s, 0.05).sEstimate;
        const double b = propagate_cgf(EngineParams{}, s, 0.05, shifted).sEstimate;
        CHECK(std::abs(a - b) < 1e-7);
    }

    TEST_CASE("finite envelopes are frozen")
    {
        DrivingSpec s = slow_constant();
        s.envelope = Envelope::Gaussian;
        s.te = s.period();
        OracleOptions o;
        o.max_periods = 100;
        const PropagationResult r = propagate_cgf(EngineParams{}, s, 0.0, o);
        CHECK(r.frozenEnvelope);
    }

    TEST_CASE("adiabatic regime: dynamic plus geometric matches propagation, error falls as omega^2")
    {
        // Weak cavity coupling keeps the gap (~0.73) well above ω.
        EngineParams p = EngineParams::with_uniform_coupling(0.5);
        p.g = 1;
        DrivingSpec s;
        s.envelope = Envelope::Constant;
        s.A0 = 0.3;
        OracleOptions o;
        o.periods = 50;
        o.max_periods = 200;
        std::vector<double> err;
        for (double omega : {0.1, 0.03}) {
            s.omega = omega;
            const CgfResult r = cgf(p, s, 0.1);
            const double exact = propagate_cgf(p, s, 0.1, o).sEstimate;
            const double total = std::abs(r.total() - exact) / std::abs(exact);
            const double dynamic = std::abs(r.sd - exact) / std::abs(exact);
            CHECK(total < 1e-4);
            CHECK(total < dynamic / 20);
            err.push_back(total);
        }
        const double ratio = err[0] / err[1];
        CHECK(ratio > 9 * 0.6);
        CHECK(ratio < 9 * 1.6);
    }

    TEST_CASE("input checks")
    {
        OracleOptions o;
        o.periods = 10;
        CHECK_THROWS_AS(propagate_cgf(EngineParams{}, slow_constant(), 0.0, o), ParameterError);
        o.periods = 100;
        Eigen::Matrix<double, kDim, 1> bad;
        bad << 0.5, 0.5, 0.5, 0.0, 0.0;
        o.rho0 = bad;
        CHECK_THROWS_AS(propagate_cgf(EngineParams{}, slow_constant(), 0.0, o), ParameterError);
    }
}
