// acceptance: one PASS/FAIL line per acceptance criterion.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run one; exit status 1 when it fails

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhe/oracle.hpp"
#include "qhe/parallel.hpp"
#include "qhe/sweep.hpp"

using namespace qhe;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

constexpr std::array<double, 3> kTePeriods{1, 5, 25};

DrivingSpec with_te(DrivingSpec s, double periods)
{
    s.te = periods * s.period();
    return s;
}

// Criterion 1 -----------------------------------------------------------------

struct Draw {
    EngineParams p;
    DrivingSpec s;
};

// No growing mode at λ = 0: the stationary state is the dominant eigenvector.
bool stable(const Draw& d)
{
    for (int k = 0; k < 8; ++k) {
        const Mat5 m = assemble_liouvillian(d.p, d.s, 0.0, d.s.period() * k / 8, Variant::FixDiagonal).m;
        if (dominant_triple(m).zeta > 1e-12L * m.norm()) return false;
    }
    return true;
}

Draw random_draw(std::mt19937_64& rng, int& rejected)
{
    std::uniform_real_distribution<double> u(0, 1);
    auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
    for (;;) {
        Draw d;
        d.p = EngineParams::with_uniform_coupling(in(0.02, 0.3));
        d.p.E1 = in(0.0, 0.3);
        d.p.Ea = in(1.0, 2.0);
        d.p.Eb = in(d.p.E1 + 0.1, d.p.Ea - 0.1);
        d.p.g = in(5, 60);
        d.p.tau = in(0, 0.05);
        d.p.ph = in(0, 1);
        d.p.pc = in(0, 0.3); // the printed coherence terms give a growing mode for larger p_c
        d.p.tl = in(1, 3);
        d.s.Tc0 = in(0.5, 1.5);
        d.s.Th0 = d.s.Tc0 * in(1.1, 2.5);
        // Keeps T_h(t) > T_c(t) > 0 whatever the phase.
        d.s.A0 = in(0, std::min({0.05, 0.4 * (d.s.Th0 - d.s.Tc0), 0.5 * d.s.Tc0}));
        d.s.omega = in(500, 5000);
        d.s.phi = in(0, std::numbers::pi);
        d.s.envelope = static_cast<Envelope>(rng() % 3);
        d.s = with_te(d.s, in(1, 25));
        try {
            d.p.validate();
            d.s.validate();
            if (stable(d)) return d;
        } catch (const ParameterError&) {
        }
        ++rejected;
    }
}

Outcome conservation()
{
    Outcome o;
    std::mt19937_64 rng(0xc0ffee);
    double worst_sd = 0, worst_sg = 0;
    double printed = 0, fixes = 0;
    int rejected = 0;
    for (int i = 0; i < 200; ++i) {
        const Draw d = random_draw(rng, rejected);
        const CgfResult r = cgf(d.p, d.s, 0.0);
        worst_sd = std::max(worst_sd, std::abs(r.sd));
        worst_sg = std::max(worst_sg, std::abs(r.sg));

        const double t = d.s.period() * std::uniform_real_distribution<double>(0, 1)(rng);
        for (Variant v : {Variant::AsPrinted, Variant::FixDiagonal, Variant::FixGain}) {
            const Mat5 m = assemble_liouvillian(d.p, d.s, 0.0, t, v).m;
            const double defect = static_cast<double>(left_null_defect(m) / m.cwiseAbs().maxCoeff());
            if (v == Variant::AsPrinted) {
                printed = i == 0 ? defect : std::min(printed, defect);
            } else {
                fixes = std::max(fixes, defect);
            }
        }
    }
    o.require(worst_sd < 1e-9, fmt("200 draws (%d rejected as invalid); max|S_d(0)|=%.2e", rejected, worst_sd));
    o.require(worst_sg < 1e-9, fmt("max|S_g(0)|=%.2e", worst_sg));
    o.require(printed > 1e-12, fmt("as_printed min defect=%.2e", printed));
    o.require(fixes < 1e-12, fmt("fix_diagonal/fix_gain max defect=%.2e", fixes));
    return o;
}

// Criterion 2 -----------------------------------------------------------------

Outcome geometric_vanishing()
{
    Outcome o;
    double worst = 0;
    int cases = 0;
    for (int which = 0; which < 2; ++which) {
        for (Envelope e : {Envelope::Constant, Envelope::Gaussian, Envelope::Lorentzian}) {
            for (double k : kTePeriods) {
                DrivingSpec s;
                s.envelope = e;
                s = with_te(s, k);
                (which == 0 ? s.phi : s.A0) = 0;
                const CumulantSet c = cumulants(EngineParams{}, s);
                worst = std::max({worst, std::abs(c.jg), std::abs(c.ng)});
                ++cases;
            }
        }
    }
    o.require(worst <= 1e-8, fmt("max(|jg|,|ng|)=%.2e over %d cases", worst, cases));
    return o;
}

// Criterion 3 -----------------------------------------------------------------

Outcome gauge_invariance()
{
    Outcome o;
    const EngineParams p;
    const DrivingSpec s;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(0.1, 10);
    std::bernoulli_distribution flip(0.5);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const double lambda = trial % 2 ? 0.1 : -0.05;
        const double base = geometric_cgf(p, s, lambda);
        CgfOptions opts;
        opts.gauge_perturbation = [&](Real) { return Real(mag(rng) * (flip(rng) ? -1 : 1)); };
        const double moved = geometric_cgf(p, s, lambda, opts);
        worst = std::max(worst, std::abs(moved - base) / std::abs(base));
    }
    o.require(worst < 1e-9, fmt("max rel change=%.2e over 20 trials", worst));
    return o;
}

// Criterion 4 -----------------------------------------------------------------

Outcome oracle_equivalence()
{
    Outcome o;
    DrivingSpec s;
    s.envelope = Envelope::Constant;
    s.omega /= 100;
    const EngineParams p;
    for (double lambda : {-0.1, -0.05, 0.05, 0.1}) {
        const CgfResult r = cgf(p, s, lambda);
        const PropagationResult prop = propagate_cgf(p, s, lambda);
        const double rel = std::abs(r.total() - prop.sEstimate) / std::abs(prop.sEstimate);
        o.require(rel < 1e-3, fmt("lambda=%+.2f rel=%.2e (dynamic only %.2e)", lambda, rel,
                                  std::abs(r.sd - prop.sEstimate) / std::abs(prop.sEstimate)));
    }
    return o;
}

// Criterion 5 -----------------------------------------------------------------

RunConfig flux_noise_grid(int ph_points)
{
    std::ostringstream doc;
    doc << R"({"driving": {"envelope": "gaussian"}, "sweep": {"recipe": "flux-noise", "axes": [)"
        << R"({"name": "te_periods", "values": [1, 5, 25]},)"
        << R"({"name": "ph", "linspace": [0, 1, )" << ph_points << "]}]}}";
    return parse_config(nlohmann::json::parse(doc.str()));
}

Outcome coherence_optimum()
{
    Outcome o;
    const SweepOutput out = run_sweep(flux_noise_grid(51), default_workers());
    for (const char* q : {"jd", "nd"}) {
        const auto rows = optimum_trace(out.table, q);
        o.require(rows.size() == 3, fmt("%s groups=%zu", q, rows.size()));
        for (const OptimumRow& r : rows) {
            o.require(std::abs(r.phStar - 0.30) <= 0.02 && !r.boundary,
                      fmt("%s te=%s ph*=%.4f", q, r.key.front().second.c_str(), r.phStar));
        }
    }
    return o;
}

// Criterion 6 -----------------------------------------------------------------

Outcome saturation()
{
    Outcome o;
    const EngineParams p;
    std::vector<CumulantSet> g;
    for (double k : kTePeriods) g.push_back(cumulants(p, with_te(DrivingSpec{}, k)));
    DrivingSpec cs;
    cs.envelope = Envelope::Constant;
    const CumulantSet c = cumulants(p, cs);

    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const CumulantSet& last = g.back();
    o.require(rel(last.jd, c.jd) < 0.01, fmt("jd rel=%.2e", rel(last.jd, c.jd)));
    o.require(rel(last.jg, c.jg) < 0.01, fmt("jg rel=%.2e", rel(last.jg, c.jg)));
    o.require(rel(last.nd, c.nd) < 0.01, fmt("nd rel=%.2e", rel(last.nd, c.nd)));
    o.require(rel(last.ng, c.ng) < 0.01, fmt("ng rel=%.2e", rel(last.ng, c.ng)));

    bool jg_down = true, jd_up = true;
    double nd_lo = g[0].nd, nd_hi = g[0].nd;
    for (std::size_t i = 1; i < g.size(); ++i) {
        jg_down = jg_down && g[i].jg < g[i - 1].jg;
        jd_up = jd_up && g[i].jd > g[i - 1].jd;
        nd_lo = std::min(nd_lo, g[i].nd);
        nd_hi = std::max(nd_hi, g[i].nd);
    }
    o.require(jg_down, "jg decreasing in te");
    o.require(jd_up, "jd increasing in te");
    o.require((nd_hi - nd_lo) / nd_lo < 0.01, fmt("nd spread=%.2e", (nd_hi - nd_lo) / nd_lo));

    // Informational: closing the loop with the jump term trades one half of
    // this criterion for the other.
    CumulantOptions jump;
    jump.cgf.loop = LoopPolicy::JumpClosure;
    const CumulantSet j1 = cumulants(p, with_te(DrivingSpec{}, 1), jump);
    const CumulantSet j25 = cumulants(p, with_te(DrivingSpec{}, 25), jump);
    const CumulantSet jc = cumulants(p, cs, jump);
    o.detail += fmt(" [jump_closure, not scored: jg rel=%.2e, ng rel=%.2e, jg %s in te]", rel(j25.jg, jc.jg),
                    rel(j25.ng, jc.ng), j25.jg < j1.jg ? "decreasing" : "increasing");
    return o;
}

// Criterion 7 -----------------------------------------------------------------

std::vector<double> eta_c_grid()
{
    std::vector<double> v;
    for (int i = 0; i < 8; ++i) v.push_back(0.04 + (0.15 - 0.04) * i / 7);
    return v;
}

Outcome emp_universality()
{
    Outcome o;
    const EngineParams p;

    DrivingSpec dyn;
    dyn.phi = 0;
    EmpOptions d;
    d.thermo.contribution = Contribution::Dynamic;
    const LinearFit a = carnot_sweep(p, dyn, eta_c_grid(), d, default_workers()).fit;
    o.require(std::abs(a.slope - 0.5) <= 0.01, fmt("dynamic slope=%.4f+-%.4f", a.slope, a.slopeSe));
    o.require(std::abs(a.intercept) < 0.005, fmt("dynamic intercept=%.4f", a.intercept));

    const DrivingSpec geo; // φ = π/2, Gaussian, t_e = t_p
    EmpOptions t;
    t.thermo.contribution = Contribution::Total;
    const LinearFit b = carnot_sweep(p, geo, eta_c_grid(), t, default_workers()).fit;
    o.require(std::abs(b.slope - 0.5) > 5 * b.slopeSe,
              fmt("geometric slope=%.4f+-%.4f (%.1f SE from 1/2)", b.slope, b.slopeSe,
                  std::abs(b.slope - 0.5) / b.slopeSe));
    o.require(std::abs(b.intercept) > 0.005, fmt("geometric intercept=%.4f", b.intercept));
    return o;
}

// Criterion 8 -----------------------------------------------------------------

Outcome tur_bound()
{
    Outcome o;
    struct Job {
        EngineParams p;
        DrivingSpec s;
    };
    std::vector<Job> grid;
    for (double tl : {1.2, 2.0, 2.7}) {
        for (int i = 0; i <= 10; ++i) {
            for (double k : kTePeriods) {
                Job j;
                j.p.tl = tl;
                j.p.ph = 0.1 * i;
                j.s.phi = 0;
                j.s = with_te(j.s, k);
                grid.push_back(j);
            }
        }
    }
    std::vector<double> ratio(grid.size());
    parallel_for(grid.size(), default_workers(), [&](std::size_t i) { ratio[i] = tur_ratio(grid[i].p, grid[i].s).ratio; });
    const double lowest = *std::min_element(ratio.begin(), ratio.end());
    o.require(lowest > 1, fmt("phi=0 min gamma/eta=%.4f over %zu points", lowest, grid.size()));

    double below = INFINITY;
    EngineParams hot;
    hot.tl = 2.7;
    for (int i = 0; i <= 10; ++i) {
        hot.ph = 0.1 * i;
        below = std::min(below, tur_ratio(hot, DrivingSpec{}).ratio);
    }
    o.require(below < 1, fmt("phi=pi/2 tl=2.7 te=tp min gamma/eta=%.4f", below));

    hot.ph = 0.3;
    DrivingSpec cs;
    cs.envelope = Envelope::Constant;
    const double sat = tur_ratio(hot, with_te(DrivingSpec{}, 25)).ratio;
    const double con = tur_ratio(hot, cs).ratio;
    o.require(std::abs(sat - con) / std::abs(con) < 0.01, fmt("te=25tp vs constant rel=%.2e", std::abs(sat - con) / std::abs(con)));
    return o;
}

// Criterion 9 -----------------------------------------------------------------

Outcome determinism()
{
    Outcome o;
    const RunConfig cfg = flux_noise_grid(6);
    auto bytes = [&](int workers) {
        std::ostringstream os;
        write_csv(os, run_sweep(cfg, workers).table);
        return os.str();
    };
    const std::string one = bytes(1);
    const std::string many = bytes(4);
    o.require(one == many, fmt("1 vs 4 workers, %zu bytes", one.size()));
    return o;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {1, "conservation", conservation},
        {2, "geometric vanishing", geometric_vanishing},
        {3, "gauge invariance", gauge_invariance},
        {4, "oracle equivalence", oracle_equivalence},
        {5, "coherence optimum", coherence_optimum},
        {6, "saturation", saturation},
        {7, "EMP universality and breakdown", emp_universality},
        {8, "TUR bound", tur_bound},
        {9, "determinism", determinism},
    };
    return all;
}

bool report(const Criterion& c)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    return o.pass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (const Criterion& c : criteria()) {
        if (only == 0 || c.id == only) all_pass = report(c) && all_pass;
    }
    return all_pass ? 0 : 1;
}
