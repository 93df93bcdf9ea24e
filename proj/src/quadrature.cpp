// quadrature.cpp: Gauss–Legendre nodes by Newton iteration on P_n

#include "qhe/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qhe {

std::vector<QuadratureNode> gauss_legendre(int n)
{
    if (n < 1) throw ConvergenceError("Gauss-Legendre rule needs at least one node");
    std::vector<QuadratureNode> rule(static_cast<std::size_t>(n));
    const Real pi = std::numbers::pi_v<Real>;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        Real x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        Real dp = 0;
        for (int it = 0; it < 100; ++it) {
            Real p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const Real pn = n == 1 ? x : p1;
            const Real pnm1 = n == 1 ? Real(1) : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1);
            const Real dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        // Recompute the derivative at the converged root.
        Real p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? Real(1) : n * (x * p1 - p0) / (x * x - 1);
        const Real w = 2 / ((1 - x * x) * dp * dp);
        rule[static_cast<std::size_t>(i)] = {-x, w};
        rule[static_cast<std::size_t>(n - 1 - i)] = {x, w};
    }
    if (n % 2 == 1) rule[static_cast<std::size_t>(n / 2)].t = 0;
    return rule;
}

std::vector<QuadratureNode> composite_gauss_legendre(Real a, Real b, int panels, int order)
{
    const auto base = gauss_legendre(order);
    std::vector<QuadratureNode> nodes;
    nodes.reserve(static_cast<std::size_t>(panels * order));
    const Real width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const Real lo = a + p * width;
        for (const auto& q : base) {
            nodes.push_back({lo + (q.t + 1) * width / 2, q.w * width / 2});
        }
    }
    return nodes;
}

QuadratureGrid initial_grid(const QuadratureOptions& opts)
{
    const int order = opts.order;
    const int panels = std::max(1, (std::max(opts.start_nodes, 1) + order - 1) / order);
    return {panels, order};
}

PeriodIntegral integrate_period(const std::function<Real(Real)>& f, Real period,
                                const QuadratureOptions& opts)
{
    auto r = integrate_period_n([&](Real t) { return std::vector<Real>{f(t)}; }, 1, period, opts);
    return {r.values[0], r.errors[0], r.nodes};
}

PeriodIntegralN integrate_period_n(const std::function<std::vector<Real>(Real)>& f, std::size_t components,
                                   Real period, const QuadratureOptions& opts)
{
    auto evaluate = [&](const QuadratureGrid& grid) {
        std::vector<Real> acc(components, 0);
        for (const auto& q : composite_gauss_legendre(0, period, grid.panels, grid.order)) {
            const auto v = f(q.t);
            for (std::size_t c = 0; c < components; ++c) acc[c] += q.w * v[c];
        }
        return acc;
    };

    QuadratureGrid grid = initial_grid(opts);
    auto previous = evaluate(grid);
    while (true) {
        const QuadratureGrid finer{grid.panels * 2, grid.order};
        if (finer.nodes() > opts.max_nodes) {
            std::ostringstream os;
            os.precision(17);
            os << "period quadrature did not converge at " << grid.nodes() << " nodes; last estimates:";
            for (Real v : previous) os << ' ' << static_cast<double>(v);
            throw ConvergenceError(os.str());
        }
        auto current = evaluate(finer);
        bool ok = true;
        std::vector<Real> errors(components);
        for (std::size_t c = 0; c < components; ++c) {
            errors[c] = std::abs(current[c] - previous[c]);
            if (errors[c] > opts.rel_tol * std::abs(current[c]) + opts.abs_tol * period) ok = false;
        }
        if (ok) return {std::move(current), std::move(errors), finer.nodes()};
        grid = finer;
        previous = std::move(current);
    }
}

} // namespace qhe
