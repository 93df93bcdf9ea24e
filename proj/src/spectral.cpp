// spectral.cpp: Dense eigen-decomposition of the generator and eigenvector rates

#include "qhe/spectral.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace qhe {

namespace {

using Complex = std::complex<Real>;
using CVec5 = Eigen::Matrix<Complex, kDim, 1>;
using CMat5 = Eigen::Matrix<Complex, kDim, kDim>;
using Mat6 = Eigen::Matrix<Real, kDim + 1, kDim + 1>;
using Vec6 = Eigen::Matrix<Real, kDim + 1, 1>;

struct Decomposition {
    CVec5 values;
    CMat5 right;      // columns
    CMat5 left;       // rows, left = right⁻¹
    Real norm;
    int leading;      // index of the largest real part
};

Decomposition decompose(const Mat5& m)
{
    Eigen::EigenSolver<Mat5> solver(m, true);
    if (solver.info() != Eigen::Success) throw SpectralError("eigen-decomposition failed");
    Decomposition d;
    d.values = solver.eigenvalues();
    d.right = solver.eigenvectors();
    Eigen::PartialPivLU<CMat5> lu(d.right);
    d.left = lu.inverse();
    d.norm = m.norm();
    d.leading = 0;
    for (int k = 1; k < kDim; ++k) {
        if (d.values[k].real() > d.values[d.leading].real()) d.leading = k;
    }
    return d;
}

std::string describe_spectrum(const Decomposition& d)
{
    std::ostringstream os;
    os.precision(12);
    os << "spectrum:";
    for (int k = 0; k < kDim; ++k) {
        os << " (" << static_cast<double>(d.values[k].real()) << (d.values[k].imag() < 0 ? "" : "+")
           << static_cast<double>(d.values[k].imag()) << "i)";
    }
    return os.str();
}

SpectralTriple extract(const Mat5& m, const Decomposition& d, int index)
{
    const Complex value = d.values[index];
    if (std::abs(value.imag()) > kDegeneracyThreshold * d.norm) {
        throw SpectralError("dominant eigenvalue is one of a complex-conjugate pair; " + describe_spectrum(d));
    }

    CVec5 rc = d.right.col(index);
    Eigen::Index big = 0;
    rc.cwiseAbs().maxCoeff(&big);
    const Complex phase = std::conj(rc[big]) / std::abs(rc[big]);
    rc *= phase;
    const CVec5 lc = d.left.row(index).transpose() / phase;

    SpectralTriple out;
    out.R = rc.real();
    out.L = lc.real();
    out.R /= out.R.norm();
    out.L /= out.L.dot(out.R);
    out.zeta = out.L.dot(m * out.R);

    Real sub = -std::numeric_limits<Real>::infinity();
    for (int k = 0; k < kDim; ++k) {
        if (k != index) sub = std::max(sub, d.values[k].real());
    }
    out.gap = static_cast<double>(out.zeta - sub);
    out.near_degenerate = out.gap < kDegeneracyThreshold * d.norm;

    const Real scale = d.norm > 0 ? d.norm : Real(1);
    out.residual_right = static_cast<double>((m * out.R - out.zeta * out.R).norm() / (scale * out.R.norm()));
    out.residual_left =
        static_cast<double>((m.transpose() * out.L - out.zeta * out.L).norm() / (scale * out.L.norm()));
    if (out.residual_right > kResidualBound || out.residual_left > kResidualBound) {
        std::ostringstream os;
        os << "eigen-triple residuals exceed bound: right=" << out.residual_right
           << " left=" << out.residual_left << "; " << describe_spectrum(d);
        throw SpectralError(os.str());
    }
    return out;
}

} // namespace

SpectralTriple dominant_triple(const Mat5& m)
{
    const Decomposition d = decompose(m);
    SpectralTriple out = extract(m, d, d.leading);
    Eigen::Index big = 0;
    out.R.cwiseAbs().maxCoeff(&big);
    if (out.R[big] < 0) rescale(out, -1);
    return out;
}

SpectralTriple dominant_triple(const LiouvillianMatrix& m)
{
    return dominant_triple(m.m);
}

SpectralTriple dominant_triple(const Mat5& m, const SpectralTriple& hint)
{
    const Decomposition d = decompose(m);
    const CVec5 ref = hint.R.cast<Complex>() / hint.R.norm();
    int best = 0;
    Real best_overlap = -1;
    for (int k = 0; k < kDim; ++k) {
        const CVec5 v = d.right.col(k);
        const Real overlap = std::abs(ref.dot(v)) / v.norm();
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = k;
        }
    }
    if (best != d.leading && d.values[best].real() < d.values[d.leading].real()) {
        std::ostringstream os;
        os << "tracked eigenvalue lost dominance (overlap " << static_cast<double>(best_overlap) << "); "
           << describe_spectrum(d);
        throw SpectralError(os.str());
    }
    SpectralTriple out = extract(m, d, best);
    if (out.R.dot(hint.R) < 0) rescale(out, -1);
    return out;
}

SpectralTriple dominant_triple(const LiouvillianMatrix& m, const SpectralTriple& hint)
{
    return dominant_triple(m.m, hint);
}

void rescale(SpectralTriple& triple, Real c)
{
    triple.R *= c;
    triple.L /= c;
}

SpectralTriple in_gauge(SpectralTriple triple, Gauge gauge)
{
    switch (gauge) {
    case Gauge::UnitNorm:
        rescale(triple, 1 / triple.R.norm());
        break;
    case Gauge::Trace: {
        const Real c = trace_vector().dot(triple.R);
        if (!(std::abs(c) > 1e-12L * triple.R.norm())) {
            std::ostringstream os;
            os.precision(6);
            os << "dominant right eigenvector has vanishing population sum (zeta=" << static_cast<double>(triple.zeta)
               << "); the generator has a growing mode orthogonal to the trace, e.g. p_c too large for the printed "
                  "coherence terms";
            throw SpectralError(os.str());
        }
        rescale(triple, 1 / c);
        break;
    }
    }
    return triple;
}

TripleRate triple_rate(const Mat5& m, const Mat5& dm, const SpectralTriple& triple)
{
    const Vec5& R = triple.R;
    const Vec5& L = triple.L;
    const Real zeta = triple.zeta;

    TripleRate out;
    out.dzeta = L.dot(dm * R);

    Mat6 border = Mat6::Zero();
    border.topLeftCorner<kDim, kDim>() = m - zeta * Mat5::Identity();
    border.topRightCorner<kDim, 1>() = R;
    border.bottomLeftCorner<1, kDim>() = trace_vector().transpose();
    Vec6 rhs = Vec6::Zero();
    rhs.head<kDim>() = -(dm * R - out.dzeta * R);
    const Eigen::FullPivLU<Mat6> right_lu(border);
    out.dR = right_lu.solve(rhs).head<kDim>();

    border.topLeftCorner<kDim, kDim>() = m.transpose() - zeta * Mat5::Identity();
    border.topRightCorner<kDim, 1>() = R;
    border.bottomLeftCorner<1, kDim>() = R.transpose();
    rhs.head<kDim>() = -(dm.transpose() * L - out.dzeta * L);
    rhs[kDim] = -L.dot(out.dR);
    const Eigen::FullPivLU<Mat6> left_lu(border);
    out.dL = left_lu.solve(rhs).head<kDim>();
    return out;
}

TripleRate triple_derivative_t(const EngineParams& params, const DrivingSpec& spec, double lambda,
                               double t, Variant variant, const FiniteDifferenceOptions& opts)
{
    const double h0 = opts.h > 0 ? opts.h : spec.period() * 1e-3;
    const SpectralTriple centre = in_gauge(dominant_triple(assemble_liouvillian(params, spec, lambda, t, variant)),
                                           opts.gauge);

    auto matched = [&](double at) {
        SpectralTriple tri =
            in_gauge(dominant_triple(assemble_liouvillian(params, spec, lambda, at, variant), centre), opts.gauge);
        if (tri.R.dot(centre.R) < 0) rescale(tri, -1);
        return tri;
    };
    auto central = [&](double h) {
        const SpectralTriple plus = matched(t + h);
        const SpectralTriple minus = matched(t - h);
        TripleRate d;
        d.dR = (plus.R - minus.R) / (2 * Real(h));
        d.dL = (plus.L - minus.L) / (2 * Real(h));
        d.dzeta = (plus.zeta - minus.zeta) / (2 * Real(h));
        return d;
    };

    TripleRate coarse = central(h0);
    if (!opts.richardson) return coarse;
    const TripleRate fine = central(h0 / 2);
    TripleRate out;
    out.dR = (4 * fine.dR - coarse.dR) / 3;
    out.dL = (4 * fine.dL - coarse.dL) / 3;
    out.dzeta = (4 * fine.dzeta - coarse.dzeta) / 3;
    return out;
}

} // namespace qhe
