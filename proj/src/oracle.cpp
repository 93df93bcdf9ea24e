// oracle.cpp: Dormand–Prince 5(4) propagation of ρ̇ = L(λ,t)ρ with per-period renormalisation

#include "qhe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qhe {

namespace {

using V = Eigen::Matrix<double, kDim, 1>;
using M = Eigen::Matrix<double, kDim, kDim>;

// Dormand–Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Propagator {
public:
    Propagator(const EngineParams& params, const DrivingSpec& spec, double lambda, const OracleOptions& opts)
        : params_(params), spec_(spec), lambda_(lambda), opts_(opts)
    {
    }

    M generator(double t) const
    {
        return assemble_liouvillian(params_, spec_, lambda_, t, opts_.variant).m.cast<double>();
    }

    // Advances ρ from t0 to t1 exactly (last step clipped).
    void advance(V& rho, double t0, double t1, PropagationResult& stats)
    {
        double t = t0;
        if (h_ <= 0) h_ = initial_step(rho, t0, t1);
        V k1 = generator(t) * rho;
        while (t < t1) {
            double h = std::min(h_, t1 - t);
            const bool last = h >= t1 - t;
            const V k2 = generator(t + c2 * h) * (rho + h * a21 * k1);
            const V k3 = generator(t + c3 * h) * (rho + h * (a31 * k1 + a32 * k2));
            const V k4 = generator(t + c4 * h) * (rho + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const V k5 = generator(t + c5 * h) * (rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const V k6 =
                generator(t + h) * (rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const V next = rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const V k7 = generator(t + h) * next;
            const V err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double en = 0;
            for (int i = 0; i < kDim; ++i) {
                const double sc = opts_.atol + opts_.rtol * std::max(std::abs(rho[i]), std::abs(next[i]));
                en = std::max(en, std::abs(err[i]) / sc);
            }
            if (!std::isfinite(en)) throw ConvergenceError("oracle integrator produced a non-finite state");
            if (en <= 1) {
                t = last ? t1 : t + h;
                rho = next;
                k1 = k7;
                ++stats.steps;
                stats.lastStep = h;
                stats.maxErrorEstimate = std::max(stats.maxErrorEstimate, en);
                if (!last || h == h_) h_ = h * std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
            } else {
                ++stats.rejected;
                h_ = h * std::max(0.9 * std::pow(en, -0.2), 0.1);
                if (h_ < 1e-14 * std::max(1.0, std::abs(t))) {
                    throw ConvergenceError("oracle integrator step size underflow");
                }
            }
        }
    }

private:
    double initial_step(const V& rho, double t0, double t1) const
    {
        const double rate = (generator(t0) * rho).cwiseAbs().maxCoeff() / std::max(rho.cwiseAbs().maxCoeff(), 1e-300);
        const double h = rate > 0 ? 0.01 / rate : (t1 - t0);
        return std::min(h, t1 - t0);
    }

    const EngineParams& params_;
    const DrivingSpec& spec_;
    double lambda_;
    const OracleOptions& opts_;
    double h_{0};
};

struct Slope {
    double slope;
    double residual;
};

// Least-squares slope of lnG[k] against k·t_p over k ∈ [K/2, K].
Slope fit_tail(const std::vector<double>& lnG, double period)
{
    const std::size_t K = lnG.size() - 1;
    const std::size_t from = K / 2;
    const std::size_t n = K - from + 1;
    double mx = 0, my = 0;
    for (std::size_t k = from; k <= K; ++k) {
        mx += static_cast<double>(k) * period;
        my += lnG[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = from; k <= K; ++k) {
        const double x = static_cast<double>(k) * period - mx;
        sxx += x * x;
        sxy += x * (lnG[k] - my);
    }
    const double slope = sxy / sxx;
    double worst = 0;
    for (std::size_t k = from; k <= K; ++k) {
        const double fit = my + slope * (static_cast<double>(k) * period - mx);
        worst = std::max(worst, std::abs(lnG[k] - fit));
    }
    return {slope, worst};
}

} // namespace

Eigen::Matrix<double, kDim, 1> uniform_state()
{
    V rho;
    rho << 0.25, 0.25, 0.25, 0.25, 0.0;
    return rho;
}

PropagationResult propagate_cgf(const EngineParams& params, const DrivingSpec& spec_in, double lambda,
                                const OracleOptions& opts)
{
    params.validate();
    spec_in.validate();
    if (opts.periods < 50) throw ParameterError("oracle needs at least 50 periods");
    PropagationResult out;
    DrivingSpec spec = spec_in;
    if (spec.envelope != Envelope::Constant) {
        spec = frozen_envelope(spec_in);
        out.frozenEnvelope = true;
    }

    V rho = opts.rho0 ? *opts.rho0 : uniform_state();
    const double pop = rho.head<4>().sum();
    if (!(std::abs(pop - 1) < 1e-12) || (rho.head<4>().array() < 0).any() || std::abs(rho[4]) > 0.5) {
        throw ParameterError("oracle initial state must have non-negative populations summing to 1 and |coherence| <= 0.5");
    }

    const double period = spec.period();
    Propagator prop(params, spec, lambda, opts);
    out.lnG.push_back(0.0);
    double lnG = 0;
    int target = opts.periods;
    while (true) {
        while (static_cast<int>(out.lnG.size()) - 1 < target) {
            const int k = static_cast<int>(out.lnG.size()) - 1;
            prop.advance(rho, opts.phase + k * period, opts.phase + (k + 1) * period, out);
            const double norm = rho.head<4>().sum();
            if (!(norm > 0)) throw ConvergenceError("oracle generating function became non-positive");
            lnG += std::log(norm);
            rho /= norm;
            out.lnG.push_back(lnG);
        }
        const Slope s = fit_tail(out.lnG, period);
        out.sEstimate = s.slope;
        out.fitResidual = s.residual;
        out.periods = target;
        const double span = std::abs(s.slope) * period * (target - target / 2);
        if (s.residual <= opts.residual_tol * std::max(span, 1e-6)) break;
        if (target * 2 > opts.max_periods) {
            out.transientWarning = true;
            break;
        }
        target *= 2;
    }
    return out;
}

} // namespace qhe
