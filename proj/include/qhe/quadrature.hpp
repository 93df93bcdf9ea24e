// quadrature.hpp: Composite Gauss–Legendre rules over one driving period

#pragma once

#include <functional>
#include <vector>

#include "qhe/types.hpp"

namespace qhe {

struct QuadratureNode {
    Real t;
    Real w;
};

// n-point Gauss–Legendre rule on [-1, 1], nodes ascending.
std::vector<QuadratureNode> gauss_legendre(int n);

// `panels` equal panels on [a, b], each carrying an `order`-point rule.
// Nodes are returned in ascending t, which the eigenvector tracking relies on.
std::vector<QuadratureNode> composite_gauss_legendre(Real a, Real b, int panels, int order);

struct QuadratureOptions {
    int start_nodes{33};   // N ≥ 33
    int max_nodes{4097};
    int order{11};         // points per panel
    double rel_tol{1e-9};
    double abs_tol{1e-13};
};

struct QuadratureGrid {
    int panels;
    int order;
    int nodes() const { return panels * order; }
};

// Smallest panel count with at least `opts.start_nodes` nodes.
QuadratureGrid initial_grid(const QuadratureOptions& opts);

struct PeriodIntegral {
    Real value;
    Real error; // |I_N − I_{N/2}|
    int nodes;
};

// ∫_0^T f(t) dt with N doubling until |ΔI| ≤ rel_tol·|I| + abs_tol·T.
// Throws ConvergenceError at the node cap.
PeriodIntegral integrate_period(const std::function<Real(Real)>& f, Real period,
                                const QuadratureOptions& opts = {});

// Vector-valued variant; every component must meet the tolerance.
struct PeriodIntegralN {
    std::vector<Real> values;
    std::vector<Real> errors;
    int nodes;
};

PeriodIntegralN integrate_period_n(const std::function<std::vector<Real>(Real)>& f, std::size_t components,
                                   Real period, const QuadratureOptions& opts = {});

} // namespace qhe
