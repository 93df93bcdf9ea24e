// fcs.cpp: Period-averaged CGFs along a tracked eigen-triple and λ-stencil cumulants

#include "qhe/fcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace qhe {

std::string_view to_string(LoopPolicy p)
{
    switch (p) {
    case LoopPolicy::OpenPath: return "open_path";
    case LoopPolicy::Strict: return "strict";
    case LoopPolicy::JumpClosure: return "jump_closure";
    }
    return "open_path";
}

LoopPolicy parse_loop_policy(std::string_view name)
{
    if (name == "open_path") return LoopPolicy::OpenPath;
    if (name == "strict") return LoopPolicy::Strict;
    if (name == "jump_closure") return LoopPolicy::JumpClosure;
    throw ParameterError("unknown loop policy '" + std::string(name) + "' (open_path, strict, jump_closure)");
}

namespace {

constexpr Real kNoiseFactor = 4;

struct GridSums {
    Real zeta{0};
    Real geo{0};
    // First-order round-off bounds on the two sums: u·‖L̆‖·|L||R| for ζ and
    // u·(‖L̆‖/gap)·|L||Ṙ| for the geometric integrand.
    Real zeta_noise{0};
    Real geo_noise{0};
    SpectralTriple first;
    SpectralTriple last;
    double min_gap{0};
    bool near_degenerate{false};
};

SpectralTriple tracked(const Mat5& m, const SpectralTriple* hint, Real t, const CgfOptions& opts)
{
    SpectralTriple tri = hint ? dominant_triple(m, *hint) : dominant_triple(m);
    if (opts.gauge_perturbation) rescale(tri, opts.gauge_perturbation(t));
    return in_gauge(tri, Gauge::Trace);
}

GridSums sweep_grid(const EngineParams& params, const DrivingSpec& spec, double lambda, const QuadratureGrid& grid,
                    const CgfOptions& opts)
{
    const Real period = spec.period();
    GridSums out;
    out.min_gap = std::numeric_limits<double>::infinity();

    auto note = [&](const SpectralTriple& tri) {
        out.min_gap = std::min(out.min_gap, tri.gap);
        out.near_degenerate = out.near_degenerate || tri.near_degenerate;
    };

    out.first = tracked(assemble_liouvillian(params, spec, lambda, 0.0, opts.variant).m, nullptr, 0, opts);
    note(out.first);
    SpectralTriple prev = out.first;
    for (const auto& q : composite_gauss_legendre(0, period, grid.panels, grid.order)) {
        const double t = static_cast<double>(q.t);
        const Mat5 m = assemble_liouvillian(params, spec, lambda, t, opts.variant).m;
        const SpectralTriple tri = tracked(m, &prev, q.t, opts);
        note(tri);
        const Real u = std::numeric_limits<Real>::epsilon();
        const Real conditioning = m.norm() * tri.L.norm();
        out.zeta += q.w * tri.zeta;
        out.zeta_noise += q.w * u * conditioning * tri.R.norm();
        if (opts.geometric) {
            const Mat5 dm = liouvillian_rate(params, spec, lambda, t, opts.variant);
            const TripleRate rate = triple_rate(m, dm, tri);
            out.geo -= q.w * tri.L.dot(rate.dR);
            out.geo_noise += q.w * u * conditioning / Real(tri.gap) * rate.dR.norm();
        }
        prev = tri;
    }
    const Mat5 m_end = assemble_liouvillian(params, spec, lambda, static_cast<double>(period), opts.variant).m;
    out.last = tracked(m_end, &prev, period, opts);
    note(out.last);
    return out;
}

double consistency_check(const EngineParams& params, const DrivingSpec& spec, double lambda, const CgfOptions& opts)
{
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> pick(0.05, 0.95);
    const double period = spec.period();
    double worst = 0;
    for (int k = 0; k < opts.consistency_nodes; ++k) {
        const double t = pick(rng) * period;
        const Mat5 m = assemble_liouvillian(params, spec, lambda, t, opts.variant).m;
        const SpectralTriple tri = in_gauge(dominant_triple(m), Gauge::Trace);
        const TripleRate exact = triple_rate(m, liouvillian_rate(params, spec, lambda, t, opts.variant), tri);
        const TripleRate fd = triple_derivative_t(params, spec, lambda, t, opts.variant);
        // ⟨L|R⟩ = 1 ⇒ ⟨L|Ṙ⟩ = −⟨L̇|R⟩
        const Real a = tri.L.dot(exact.dR);
        const Real b = -fd.dL.dot(tri.R);
        const Real scale = tri.L.norm() * exact.dR.norm() + tri.R.norm() * fd.dL.norm();
        if (scale > 0) worst = std::max(worst, static_cast<double>(std::abs(a - b) / scale));
    }
    return worst;
}

} // namespace

CgfResult cgf(const EngineParams& params, const DrivingSpec& spec, double lambda, const CgfOptions& opts)
{
    params.validate();
    spec.validate();
    const Real period = spec.period();
    const QuadratureOptions& qo = opts.quadrature;

    QuadratureGrid grid = initial_grid(qo);
    GridSums coarse = sweep_grid(params, spec, lambda, grid, opts);
    while (true) {
        const QuadratureGrid finer{grid.panels * 2, grid.order};
        if (finer.nodes() > qo.max_nodes) {
            std::ostringstream os;
            os.precision(17);
            os << "CGF quadrature did not converge at " << grid.nodes() << " nodes (lambda=" << lambda
               << "); S_d=" << static_cast<double>(coarse.zeta / period)
               << " S_g=" << static_cast<double>(coarse.geo / period);
            throw ConvergenceError(os.str());
        }
        GridSums fine = sweep_grid(params, spec, lambda, finer, opts);
        const Real ez = std::abs(fine.zeta - coarse.zeta);
        const Real eg = std::abs(fine.geo - coarse.geo);
        // Round-off can stall the comparison on ill-conditioned triples; allow for it.
        const bool ok = ez <= qo.rel_tol * std::abs(fine.zeta) + qo.abs_tol * period + kNoiseFactor * fine.zeta_noise &&
                        eg <= qo.rel_tol * std::abs(fine.geo) + qo.abs_tol * period + kNoiseFactor * fine.geo_noise;
        if (!ok) {
            grid = finer;
            coarse = std::move(fine);
            continue;
        }

        CgfResult r;
        r.nodes = finer.nodes();
        r.sd = static_cast<double>(fine.zeta / period);
        r.sd_error = static_cast<double>(ez / period);
        r.sd_noise = static_cast<double>(fine.zeta_noise / period);
        r.sg_noise = static_cast<double>(fine.geo_noise / period);
        r.min_gap = fine.min_gap;
        r.near_degenerate = fine.near_degenerate;
        r.closure_defect = static_cast<double>((fine.last.R - fine.first.R).norm() / fine.first.R.norm());
        if (opts.geometric) {
            Real sg = fine.geo / period;
            if (r.closure_defect > kClosureTolerance) {
                if (opts.loop == LoopPolicy::Strict) {
                    std::ostringstream os;
                    os << "driving path is not closed over one period (defect " << r.closure_defect
                       << "); use loop policy open_path or jump_closure";
                    throw OpenLoopError(os.str());
                }
                if (opts.loop == LoopPolicy::JumpClosure) {
                    const Real overlap = fine.first.L.dot(fine.last.R);
                    if (!(overlap > 0)) throw SpectralError("jump closure overlap is not positive");
                    sg += std::log(overlap) / period;
                }
            }
            r.sg = static_cast<double>(sg);
            r.sg_error = static_cast<double>(eg / period);
            if (opts.consistency_nodes > 0) r.consistency_defect = consistency_check(params, spec, lambda, opts);
        }
        return r;
    }
}

double dynamic_cgf(const EngineParams& params, const DrivingSpec& spec, double lambda, const CgfOptions& opts)
{
    CgfOptions o = opts;
    o.geometric = false;
    return cgf(params, spec, lambda, o).sd;
}

double geometric_cgf(const EngineParams& params, const DrivingSpec& spec, double lambda, const CgfOptions& opts)
{
    CgfOptions o = opts;
    o.geometric = true;
    return cgf(params, spec, lambda, o).sg;
}

namespace {

struct Stencil {
    double jd, jg, nd, ng;
};

Stencil stencil(const CgfResult& m2, const CgfResult& m1, const CgfResult& c0, const CgfResult& p1,
                const CgfResult& p2, double h)
{
    auto d1 = [&](double a2, double a1, double b1, double b2) { return (a2 - 8 * a1 + 8 * b1 - b2) / (12 * h); };
    auto d2 = [&](double a2, double a1, double z, double b1, double b2) {
        return (-a2 + 16 * a1 - 30 * z + 16 * b1 - b2) / (12 * h * h);
    };
    return {d1(m2.sd, m1.sd, p1.sd, p2.sd), d1(m2.sg, m1.sg, p1.sg, p2.sg), d2(m2.sd, m1.sd, c0.sd, p1.sd, p2.sd),
            d2(m2.sg, m1.sg, c0.sg, p1.sg, p2.sg)};
}

bool agree(double a, double b, const CumulantOptions& o, double noise)
{
    return std::abs(a - b) <= o.rel_agreement * std::max(std::abs(a), std::abs(b)) + o.abs_agreement + noise;
}

} // namespace

CumulantSet cumulants(const EngineParams& params, const DrivingSpec& spec, const CumulantOptions& opts)
{
    if (!(opts.h > 0) || !(opts.h_floor > 0)) throw ParameterError("cumulant step h and h_floor must be positive");
    const CgfResult c0 = cgf(params, spec, 0.0, opts.cgf);
    // Start every stencil node one doubling below the grid that converged at
    // λ = 0, so all nodes normally share that grid and the quadrature error
    // varies smoothly in λ instead of jumping with the node count.
    CgfOptions shared = opts.cgf;
    shared.quadrature.start_nodes = c0.nodes / 2;
    shared.consistency_nodes = 0;
    auto at = [&](double l) { return cgf(params, spec, l, shared); };
    // S(0) vanishes exactly, so what is left is a sample of the round-off in
    // each CGF value; 16× covers its spread across stencil nodes.
    const double eps = 16 * std::max(std::abs(c0.sd), std::abs(c0.sg));

    double h = opts.h;
    Stencil coarse = stencil(at(-2 * h), at(-h), c0, at(h), at(2 * h), h);
    while (true) {
        const double hh = h / 2;
        const Stencil fine = stencil(at(-2 * hh), at(-hh), c0, at(hh), at(2 * hh), hh);
        // Round-off passed through the stencils: Σ|w|·ε/h for d1 and Σ|w|·ε/h² for d2.
        const double n1 = 1.5 * eps / hh, n2 = 16.0 / 3 * eps / (hh * hh);
        const bool ok = agree(coarse.jd, fine.jd, opts, n1) && agree(coarse.jg, fine.jg, opts, n1) &&
                        agree(coarse.nd, fine.nd, opts, n2) && agree(coarse.ng, fine.ng, opts, n2);
        if (ok) {
            CumulantSet out{fine.jd, fine.jg, fine.nd, fine.ng, hh, c0};
            return out;
        }
        if (hh / 2 < opts.h_floor) {
            std::ostringstream os;
            os.precision(17);
            os << "cumulant stencil did not stabilise down to h=" << hh << ": jd " << coarse.jd << " vs " << fine.jd
               << ", jg " << coarse.jg << " vs " << fine.jg << ", nd " << coarse.nd << " vs " << fine.nd << ", ng "
               << coarse.ng << " vs " << fine.ng;
            throw ConvergenceError(os.str());
        }
        h = hh;
        coarse = fine;
    }
}

} // namespace qhe
