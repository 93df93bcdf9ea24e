// model.cpp: Parameter validation, driving protocols and Liouvillian assembly

#include "qhe/model.hpp"

#include <cmath>
#include <sstream>

namespace qhe {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) throw ParameterError(what);
}

bool finite_all(std::initializer_list<double> xs)
{
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

} // namespace

EngineParams EngineParams::with_uniform_coupling(double r)
{
    EngineParams p;
    p.r1h = p.r2h = p.r1c = p.r2c = r;
    return p;
}

void EngineParams::validate() const
{
    require(finite_all({E1, E2, Eb, Ea, r1h, r2h, r1c, r2c, g, tau, ph, pc, tl}),
            "engine parameters must be finite");
    require(E1 <= E2, "engine energies must satisfy E1 <= E2");
    require(E2 < Eb, "engine energies must satisfy E2 < Eb");
    require(Eb < Ea, "engine energies must satisfy Eb < Ea");
    require(r1h >= 0 && r2h >= 0 && r1c >= 0 && r2c >= 0, "couplings must be non-negative");
    require(g >= 0, "cavity coupling must be non-negative");
    require(ph >= 0 && ph <= 1, "ph must lie in [0, 1]");
    require(pc >= 0 && pc <= 1, "pc must lie in [0, 1]");
    require(tl > 0, "cavity temperature must be positive");
    require(tau >= 0, "dephasing rate must be non-negative");
}

std::string_view to_string(Envelope e)
{
    switch (e) {
    case Envelope::Constant: return "constant";
    case Envelope::Gaussian: return "gaussian";
    case Envelope::Lorentzian: return "lorentzian";
    }
    return "unknown";
}

Envelope parse_envelope(std::string_view name)
{
    if (name == "constant" || name == "sinusoidal" || name == "Constant") return Envelope::Constant;
    if (name == "gaussian" || name == "Gaussian") return Envelope::Gaussian;
    if (name == "lorentzian" || name == "Lorentzian") return Envelope::Lorentzian;
    throw ParameterError("unknown envelope '" + std::string(name) + "'");
}

void DrivingSpec::validate() const
{
    require(finite_all({Tc0, Th0, A0, omega, phi, te, center}), "driving parameters must be finite");
    require(Tc0 > 0, "Tc0 must be positive");
    require(Th0 > Tc0, "Th0 must exceed Tc0");
    require(A0 >= 0, "driving amplitude must be non-negative");
    require(omega > 0, "driving frequency must be positive");
    if (envelope != Envelope::Constant) require(te > 0, "envelope duration must be positive");
}

DrivingSpec frozen_envelope(const DrivingSpec& spec)
{
    DrivingSpec out = spec;
    out.A0 = envelope_value(spec, 0.5 * spec.period());
    out.envelope = Envelope::Constant;
    return out;
}

double envelope_value(const DrivingSpec& spec, double t)
{
    const double u = t - spec.center;
    switch (spec.envelope) {
    case Envelope::Constant:
        return spec.A0;
    case Envelope::Gaussian:
        return spec.A0 * std::exp(-4.0 * std::numbers::ln2 * u * u / (spec.te * spec.te));
    case Envelope::Lorentzian: {
        const double half = 0.5 * spec.te;
        return spec.A0 * half * half / (u * u + half * half);
    }
    }
    return spec.A0;
}

double envelope_rate(const DrivingSpec& spec, double t)
{
    const double u = t - spec.center;
    switch (spec.envelope) {
    case Envelope::Constant:
        return 0.0;
    case Envelope::Gaussian:
        return envelope_value(spec, t) * (-8.0 * std::numbers::ln2 * u / (spec.te * spec.te));
    case Envelope::Lorentzian: {
        const double h2 = 0.25 * spec.te * spec.te;
        const double d = u * u + h2;
        return -spec.A0 * h2 * 2.0 * u / (d * d);
    }
    }
    return 0.0;
}

BathTemperatures bath_temperatures(const DrivingSpec& spec, double t)
{
    const double a = envelope_value(spec, t);
    const double wt = spec.omega * t;
    const BathTemperatures T{spec.Tc0 + a * std::sin(wt), spec.Th0 + a * std::sin(wt + spec.phi)};
    if (!(T.Tc > 0) || !(T.Th > T.Tc)) {
        std::ostringstream os;
        os.precision(17);
        os << "bath temperatures violate Th > Tc > 0 at t=" << t << " (Tc=" << T.Tc << ", Th=" << T.Th << ")";
        throw ParameterError(os.str());
    }
    return T;
}

BathTemperatures bath_temperature_rates(const DrivingSpec& spec, double t)
{
    const double a = envelope_value(spec, t);
    const double da = envelope_rate(spec, t);
    const double wt = spec.omega * t;
    return {da * std::sin(wt) + a * spec.omega * std::cos(wt),
            da * std::sin(wt + spec.phi) + a * spec.omega * std::cos(wt + spec.phi)};
}

Real bose(Real dE, Real T)
{
    return 1.0L / std::expm1(dE / T);
}

Occupations occupations(const EngineParams& params, double Tc, double Th)
{
    if (params.Eb == params.E1 || params.Ea == params.E1 || params.Ea == params.Eb) {
        throw ParameterError("degenerate energy gap in Bose factor");
    }
    if (!(Tc > 0) || !(Th > 0)) throw ParameterError("bath temperatures must be positive");
    Occupations n{};
    n.nc = bose(Real(params.Eb) - params.E1, Tc);
    n.nh = bose(Real(params.Ea) - params.E1, Th);
    n.nl = bose(Real(params.Ea) - params.Eb, params.tl);
    n.ntc = n.nc + 1;
    n.nth = n.nh + 1;
    n.ntl = n.nl + 1;
    return n;
}

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::AsPrinted: return "as_printed";
    case Variant::FixDiagonal: return "fix_diagonal";
    case Variant::FixGain: return "fix_gain";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name)
{
    if (name == "as_printed") return Variant::AsPrinted;
    if (name == "fix_diagonal" || name == "trace_conserving") return Variant::FixDiagonal;
    if (name == "fix_gain") return Variant::FixGain;
    throw ParameterError("invalid Liouvillian variant '" + std::string(name) + "'");
}

Mat5 liouvillian_from_occupations(const EngineParams& p, Real nc, Real nh, Real nl,
                                  double lambda, Variant variant)
{
    const Real ntc = nc + 1, nth = nh + 1, ntl = nl + 1;
    const Real r1h = p.r1h, r2h = p.r2h, r1c = p.r1c, r2c = p.r2c;
    const Real rh = r1h + r2h, rc = r1c + r2c;
    const Real g2 = Real(p.g) * p.g;
    const Real ph = p.ph, pc = p.pc;

    const Real n1 = -(r1c * nc + r1h * nh);
    const Real n2 = -(r2c * nc + r2h * nh);
    const Real y = -rc * nc * pc - rh * nh * ph;
    const Real deph = rh * nh / 2 + rc * nc / 2 + Real(p.tau);

    Real decay = 2; // factor on r_h ñ_h and r_c ñ_c in the a/b diagonal
    Real gain = 1;  // factor on the a,b → 1,2 feeding entries
    switch (variant) {
    case Variant::AsPrinted: break;
    case Variant::FixDiagonal: decay = 1; break;
    case Variant::FixGain: gain = 2; break;
    }

    const Real em = std::exp(-static_cast<Real>(lambda));
    const Real ep = std::exp(static_cast<Real>(lambda));

    Mat5 m;
    m << n1, 0, gain * r1h * nth, gain * r1c * ntc, y,
         0, n2, gain * r2h * nth, gain * r2c * ntc, y,
         r1h * nh, r2h * nh, -g2 * ntl - decay * rh * nth, g2 * nl * em, 2 * rh * ph * nh,
         r1c * nc, r2c * nc, g2 * ntl * ep, -g2 * nl - decay * rc * ntc, 2 * rc * pc * nc,
         y / 2, y / 2, rh * ph * nth, rc * pc * ntc, -deph;
    return m;
}

LiouvillianMatrix assemble_liouvillian(const EngineParams& params, const DrivingSpec& spec,
                                       double lambda, double t, Variant variant)
{
    const BathTemperatures T = bath_temperatures(spec, t);
    const Occupations n = occupations(params, T.Tc, T.Th);
    return {liouvillian_from_occupations(params, n.nc, n.nh, n.nl, lambda, variant), lambda, t, variant};
}

Mat5 liouvillian_rate(const EngineParams& params, const DrivingSpec& spec,
                      double lambda, double t, Variant variant)
{
    const BathTemperatures T = bath_temperatures(spec, t);
    const BathTemperatures dT = bath_temperature_rates(spec, t);
    const Occupations n = occupations(params, T.Tc, T.Th);

    const Real xc = (Real(params.Eb) - params.E1) / T.Tc;
    const Real xh = (Real(params.Ea) - params.E1) / T.Th;
    const Real dnc = n.nc * n.ntc * xc / T.Tc * dT.Tc;
    const Real dnh = n.nh * n.nth * xh / T.Th * dT.Th;

    const Mat5 base = liouvillian_from_occupations(params, 0, 0, n.nl, lambda, variant);
    const Mat5 along_c = liouvillian_from_occupations(params, 1, 0, n.nl, lambda, variant) - base;
    const Mat5 along_h = liouvillian_from_occupations(params, 0, 1, n.nl, lambda, variant) - base;
    return along_c * dnc + along_h * dnh;
}

Real left_null_defect(const Mat5& m)
{
    return (trace_vector().transpose() * m).cwiseAbs().maxCoeff();
}

} // namespace qhe
