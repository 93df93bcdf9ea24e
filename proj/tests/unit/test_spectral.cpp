#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhe/spectral.hpp"

using namespace qhe;

namespace {

// det(M − zI) by partially pivoted LU.
Real shifted_det(const Mat5& m, Real z)
{
    return (m - z * Mat5::Identity()).partialPivLu().determinant();
}

// Root of det(M − zI) bracketed in [a, b], by bisection.
Real det_root(const Mat5& m, Real a, Real b)
{
    Real fa = shifted_det(m, a);
    for (int it = 0; it < 200; ++it) {
        const Real mid = (a + b) / 2;
        const Real fm = shifted_det(m, mid);
        if ((fm > 0) == (fa > 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return (a + b) / 2;
}

SpectralTriple reference_triple(double lambda, double t)
{
    return dominant_triple(assemble_liouvillian(EngineParams{}, DrivingSpec{}, lambda, t, Variant::FixDiagonal));
}

} // namespace

TEST_SUITE("spectral")
{
    TEST_CASE("diagonal matrix")
    {
        Mat5 m = Mat5::Zero();
        m.diagonal() << -1, -2, -3, -4, -5;
        const SpectralTriple t = dominant_triple(m);
        CHECK(static_cast<double>(t.zeta) == doctest::Approx(-1).epsilon(1e-15));
        CHECK(static_cast<double>((t.R - Vec5::Unit(0)).norm()) < 1e-15);
        CHECK(static_cast<double>((t.L - Vec5::Unit(0)).norm()) < 1e-15);
        CHECK(t.gap == doctest::Approx(1));
    }

    TEST_CASE("stationary state at zero counting field")
    {
        for (double t : {0.0, 7e-4, 2e-3}) {
            const SpectralTriple tri = in_gauge(reference_triple(0.0, t), Gauge::Trace);
            CHECK(std::abs(static_cast<double>(tri.zeta)) < 1e-10);
            CHECK(static_cast<double>((tri.L - trace_vector()).norm()) < 1e-10);
            CHECK(static_cast<double>(trace_vector().dot(tri.R)) == doctest::Approx(1).epsilon(1e-15));
            for (int k = 0; k < 4; ++k) CHECK(tri.R[k] > 0);
        }
    }

    TEST_CASE("dominant eigenvalue agrees with an independent determinant root")
    {
        for (double lambda : {0.1, -0.1, 0.5}) {
            const Mat5 m = assemble_liouvillian(EngineParams{}, DrivingSpec{}, lambda, 0.0, Variant::FixDiagonal).m;
            const SpectralTriple t = dominant_triple(m);
            const Real scale = std::max<Real>(std::abs(t.zeta), 1e-6L);
            const Real root = det_root(m, t.zeta - 0.5L * scale, t.zeta + 0.5L * scale);
            CHECK(static_cast<double>(std::abs(root - t.zeta) / scale) < 1e-9);

            // No real eigenvalue above ζ: det(M − zI) keeps one sign up to the Gershgorin bound.
            const Real bound = m.cwiseAbs().rowwise().sum().maxCoeff();
            const Real lo = t.zeta + 1e-3L * t.gap;
            const bool sign = shifted_det(m, lo) > 0;
            bool one_sign = true;
            for (int k = 1; k <= 4000; ++k) {
                const Real z = lo + (bound - lo) * std::pow(Real(k) / 4000, 3);
                one_sign = one_sign && ((shifted_det(m, z) > 0) == sign);
            }
            CHECK(one_sign);
        }
    }

    TEST_CASE("triple contract: biorthonormal, small residuals")
    {
        const SpectralTriple t = reference_triple(0.2, 1e-3);
        CHECK(static_cast<double>(t.L.dot(t.R)) == doctest::Approx(1).epsilon(1e-12));
        CHECK(t.residual_right <= kResidualBound);
        CHECK(t.residual_left <= kResidualBound);
        CHECK_FALSE(t.near_degenerate);
        Eigen::Index big = 0;
        t.R.cwiseAbs().maxCoeff(&big);
        CHECK(t.R[big] > 0);
    }

    TEST_CASE("complex dominant pair is rejected")
    {
        Mat5 m = Mat5::Zero();
        m(0, 0) = -1;
        m(0, 1) = -2;
        m(1, 0) = 2;
        m(1, 1) = -1;
        m(2, 2) = -3;
        m(3, 3) = -4;
        m(4, 4) = -5;
        CHECK_THROWS_AS(dominant_triple(m), SpectralError);
    }

    TEST_CASE("tracking keeps the sign of the hint")
    {
        const SpectralTriple a = reference_triple(0.1, 0.0);
        SpectralTriple flipped = a;
        rescale(flipped, -1);
        const Mat5 m = assemble_liouvillian(EngineParams{}, DrivingSpec{}, 0.1, 1e-5, Variant::FixDiagonal).m;
        const SpectralTriple b = dominant_triple(m, flipped);
        CHECK(b.R.dot(flipped.R) > 0);
        CHECK(static_cast<double>(b.zeta) == doctest::Approx(static_cast<double>(dominant_triple(m).zeta)).epsilon(1e-14));
    }

    TEST_CASE("dominant eigenvalue is real and simple along the cycle; overlaps stay high")
    {
        const EngineParams p;
        const DrivingSpec s;
        for (double lambda : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
            SpectralTriple prev = reference_triple(lambda, 0.0);
            for (int i = 1; i <= 66; ++i) {
                const double t = s.period() * i / 66;
                const SpectralTriple cur = dominant_triple(assemble_liouvillian(p, s, lambda, t, Variant::FixDiagonal), prev);
                REQUIRE_FALSE(cur.near_degenerate);
                const Real overlap = cur.R.dot(prev.R) / (cur.R.norm() * prev.R.norm());
                REQUIRE(static_cast<double>(overlap) > 0.99);
                prev = cur;
            }
        }
    }

    TEST_CASE("finite-difference eigenvector rate")
    {
        const EngineParams p;
        DrivingSpec s;
        const double t = 0.3 * s.period();

        SUBCASE("static generator gives zero rate")
        {
            s.A0 = 0;
            const TripleRate d = triple_derivative_t(p, s, 0.1, t, Variant::FixDiagonal);
            const SpectralTriple tri = in_gauge(reference_triple(0.1, t), Gauge::Trace);
            CHECK(static_cast<double>(d.dR.norm() * s.period() / tri.R.norm()) < 1e-9);
        }

        SUBCASE("normalisation is preserved to first order")
        {
            for (Gauge g : {Gauge::Trace, Gauge::UnitNorm}) {
                FiniteDifferenceOptions o;
                o.gauge = g;
                const TripleRate d = triple_derivative_t(p, s, 0.1, t, Variant::FixDiagonal, o);
                const SpectralTriple tri = in_gauge(reference_triple(0.1, t), g);
                const Real sum = tri.L.dot(d.dR) + d.dL.dot(tri.R);
                CHECK(static_cast<double>(std::abs(sum) * s.period()) < 1e-8);
            }
        }

        SUBCASE("second-order convergence without Richardson")
        {
            FiniteDifferenceOptions o;
            o.richardson = false;
            const SpectralTriple tri = in_gauge(reference_triple(0.1, t), Gauge::Trace);
            std::vector<Real> v;
            for (double h : {4e-3, 2e-3, 1e-3}) {
                o.h = h * s.period();
                v.push_back(tri.L.dot(triple_derivative_t(p, s, 0.1, t, Variant::FixDiagonal, o).dR));
            }
            const double ratio = static_cast<double>((v[0] - v[1]) / (v[1] - v[2]));
            CHECK(ratio == doctest::Approx(4).epsilon(0.05));
        }

        SUBCASE("bordered-system rate matches the finite difference")
        {
            for (double lambda : {0.1, -0.3}) {
                const Mat5 m = assemble_liouvillian(p, s, lambda, t, Variant::FixDiagonal).m;
                const SpectralTriple tri = in_gauge(dominant_triple(m), Gauge::Trace);
                const TripleRate exact = triple_rate(m, liouvillian_rate(p, s, lambda, t, Variant::FixDiagonal), tri);
                const TripleRate fd = triple_derivative_t(p, s, lambda, t, Variant::FixDiagonal);
                CHECK(static_cast<double>((exact.dR - fd.dR).norm() / exact.dR.norm()) < 1e-7);
                CHECK(static_cast<double>((exact.dL - fd.dL).norm() / exact.dL.norm()) < 1e-7);
                CHECK(static_cast<double>(exact.dzeta) == doctest::Approx(static_cast<double>(fd.dzeta)).epsilon(1e-7));
                CHECK(std::abs(static_cast<double>(trace_vector().dot(exact.dR))) < 1e-12 * static_cast<double>(exact.dR.norm()));
            }
        }
    }
}
