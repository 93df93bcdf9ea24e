// thermo.cpp: Engine thermodynamics built on the period-averaged cumulants

#include "qhe/thermo.hpp"

#include <cmath>
#include <sstream>

#include "qhe/parallel.hpp"

namespace qhe {

std::string_view to_string(Contribution c)
{
    return c == Contribution::Dynamic ? "dynamic" : "total";
}

Contribution parse_contribution(std::string_view name)
{
    if (name == "dynamic") return Contribution::Dynamic;
    if (name == "total") return Contribution::Total;
    throw ParameterError("unknown contribution '" + std::string(name) + "' (dynamic, total)");
}

std::string_view to_string(TcConvention c)
{
    return c == TcConvention::Base ? "base" : "period_average";
}

TcConvention parse_tc_convention(std::string_view name)
{
    if (name == "period_average") return TcConvention::PeriodAverage;
    if (name == "base") return TcConvention::Base;
    throw ParameterError("unknown Tc convention '" + std::string(name) + "' (period_average, base)");
}

double mean_cold_temperature(const DrivingSpec& spec, const QuadratureOptions& quad)
{
    spec.validate();
    const Real period = spec.period();
    const auto r = integrate_period([&](Real t) { return Real(bath_temperatures(spec, static_cast<double>(t)).Tc); },
                                    period, quad);
    return static_cast<double>(r.value / period);
}

double work(const EngineParams& params, const DrivingSpec& spec, const QuadratureOptions& quad)
{
    params.validate();
    const Real nl = bose(params.Ea - params.Eb, params.tl);
    const Real log_ratio = std::log((1 + nl) / nl);
    return static_cast<double>(params.Ea - params.Eb + log_ratio * mean_cold_temperature(spec, quad));
}

double efficiency(const EngineParams& params, double W)
{
    const double gap = params.Ea - params.E1;
    if (!(gap != 0)) throw ParameterError("efficiency undefined for Ea == E1");
    return W / gap;
}

double affinity(const EngineParams& params, const DrivingSpec& spec, const QuadratureOptions& quad)
{
    params.validate();
    spec.validate();
    const auto r = integrate_period_n(
        [&](Real t) {
            const auto T = bath_temperatures(spec, static_cast<double>(t));
            const Occupations o = occupations(params, T.Tc, T.Th);
            return std::vector<Real>{o.ntc * o.nh, o.nc * o.nth};
        },
        2, spec.period(), quad);
    const Real nl = bose(params.Ea - params.Eb, params.tl);
    const Real ratio = (nl + 1) * r.values[0] / (nl * r.values[1]);
    if (!(ratio > 0)) throw ParameterError("affinity undefined: non-positive rate ratio");
    return static_cast<double>(std::log(ratio));
}

TurValues tur(double etaC, double P, double eta, double A, double j, double Tc)
{
    const double denom = P + Tc * A * j;
    if (denom == 0) throw ParameterError("TUR ratio singular: P + Tc*A*j = 0");
    TurValues out;
    out.gamma = etaC * P / denom;
    out.ratio = out.gamma / eta;
    out.entropy_rate = j * A;
    return out;
}

namespace {

CumulantOptions cumulant_options(const ThermoOptions& opts)
{
    CumulantOptions c = opts.cumulants;
    if (opts.contribution == Contribution::Dynamic) c.cgf.geometric = false;
    return c;
}

} // namespace

ThermoReport thermo_report(const EngineParams& params, const DrivingSpec& spec, const ThermoOptions& opts)
{
    const QuadratureOptions& quad = opts.cumulants.cgf.quadrature;
    ThermoReport r;
    r.cumulants = cumulants(params, spec, cumulant_options(opts));
    r.j = opts.contribution == Contribution::Dynamic ? r.cumulants.jd : r.cumulants.j();
    r.W = work(params, spec, quad);
    r.P = power(r.W, r.j);
    r.eta = efficiency(params, r.W);
    r.etaC = spec.carnot_efficiency();
    r.affinity = affinity(params, spec, quad);
    r.Tc = opts.tc == TcConvention::Base ? spec.Tc0 : mean_cold_temperature(spec, quad);
    const TurValues t = tur(r.etaC, r.P, r.eta, r.affinity, r.j, r.Tc);
    r.gamma = t.gamma;
    r.turRatio = t.ratio;
    r.entropyRate = t.entropy_rate;
    return r;
}

double power(const EngineParams& params, const DrivingSpec& spec, const ThermoOptions& opts)
{
    const CumulantSet c = cumulants(params, spec, cumulant_options(opts));
    const double j = opts.contribution == Contribution::Dynamic ? c.jd : c.j();
    return power(work(params, spec, opts.cumulants.cgf.quadrature), j);
}

TurValues tur_ratio(const EngineParams& params, const DrivingSpec& spec, const ThermoOptions& opts)
{
    const ThermoReport r = thermo_report(params, spec, opts);
    return {r.gamma, r.turRatio, r.entropyRate};
}

EmpResult emp(const EngineParams& params, const DrivingSpec& spec, const EmpOptions& opts)
{
    if (opts.scan_nodes < 3) throw ParameterError("EMP scan needs at least 3 nodes");
    EmpResult out;
    out.ebLow = params.E1 + opts.margin;
    out.ebHigh = params.Ea - opts.margin;
    if (!(out.ebLow < out.ebHigh)) throw ParameterError("EMP range is empty");

    auto P = [&](double eb) {
        EngineParams p = params;
        p.Eb = eb;
        ++out.evaluations;
        return power(p, spec, opts.thermo);
    };

    const int n = opts.scan_nodes;
    std::vector<double> xs(static_cast<std::size_t>(n)), ps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[i] = out.ebLow + (out.ebHigh - out.ebLow) * i / (n - 1);
        ps[i] = P(xs[i]);
    }
    int best = 0;
    for (int i = 1; i < n; ++i) {
        if (ps[i] > ps[best]) best = i;
    }
    for (int i = 1; i + 1 < n; ++i) {
        if (ps[i] > ps[i - 1] && ps[i] >= ps[i + 1]) ++out.localMaxima;
    }

    if (best == 0 || best == n - 1) {
        out.boundary = true;
        out.ebStar = xs[best];
        out.pStar = ps[best];
    } else {
        // Golden-section search on the bracket around the scan maximum.
        const double invphi = (std::sqrt(5.0) - 1) / 2;
        double a = xs[best - 1], b = xs[best + 1];
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        double fc = P(c), fd = P(d);
        while (b - a > opts.tolerance) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = P(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = P(d);
            }
        }
        out.ebStar = fc > fd ? c : d;
        out.pStar = std::max(fc, fd);
        if (ps[best] > out.pStar) {
            out.ebStar = xs[best];
            out.pStar = ps[best];
        }
    }
    EngineParams p = params;
    p.Eb = out.ebStar;
    out.etaStar = efficiency(p, work(p, spec, opts.thermo.cumulants.cgf.quadrature));
    return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) throw ParameterError("fit_line: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw ParameterError("fit_line needs at least three points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw ParameterError("fit_line: x values are all equal");
    LinearFit f;
    f.points = static_cast<int>(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ssr += e * e;
    }
    const double s2 = ssr / static_cast<double>(n - 2);
    f.slopeSe = std::sqrt(s2 / sxx);
    f.interceptSe = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    return f;
}

CarnotSweep carnot_sweep(const EngineParams& params, const DrivingSpec& spec, const std::vector<double>& etaCs,
                         const EmpOptions& opts, int workers)
{
    CarnotSweep out;
    out.points.resize(etaCs.size());
    for (std::size_t i = 0; i < etaCs.size(); ++i) {
        const double e = etaCs[i];
        if (!(e > 0 && e < 1)) {
            std::ostringstream os;
            os << "Carnot efficiency " << e << " outside (0, 1)";
            throw ParameterError(os.str());
        }
        out.points[i].etaC = e;
        out.points[i].Th0 = spec.Tc0 / (1 - e);
    }
    parallel_for(etaCs.size(), workers, [&](std::size_t i) {
        DrivingSpec s = spec;
        s.Th0 = out.points[i].Th0;
        out.points[i].emp = emp(params, s, opts);
    });
    std::vector<double> x, y;
    for (const auto& p : out.points) {
        x.push_back(p.etaC);
        y.push_back(p.emp.etaStar);
    }
    if (x.size() >= 3) out.fit = fit_line(x, y);
    return out;
}

} // namespace qhe
