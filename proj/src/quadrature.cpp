#include "halfcrack/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "halfcrack/errors.hpp"

namespace halfcrack {

namespace {

GaussRule compute_rule(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order)
{
    if (order < 1 || order > kMaxGaussOrder) {
        throw DomainError("Gauss-Legendre order must be in [1, " +
                          std::to_string(kMaxGaussOrder) + "]");
    }
    static const std::array<GaussRule, kMaxGaussOrder> table = [] {
        std::array<GaussRule, kMaxGaussOrder> t;
        for (int n = 1; n <= kMaxGaussOrder; ++n) {
            t[n - 1] = compute_rule(n);
        }
        return t;
    }();
    return table[order - 1];
}

MappedRule gauss_on(double lo, double hi, int order)
{
    const GaussRule& g = gauss_legendre(order);
    MappedRule out;
    out.x.resize(order);
    out.w.resize(order);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < order; ++i) {
        out.x[i] = mid + half * g.nodes[i];
        out.w[i] = half * g.weights[i];
    }
    return out;
}

MappedRule composite_gauss(double lo, double hi, int panels, int order)
{
    MappedRule out;
    out.x.reserve(static_cast<size_t>(panels) * order);
    out.w.reserve(static_cast<size_t>(panels) * order);
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const MappedRule r = gauss_on(lo + p * h, lo + (p + 1) * h, order);
        out.x.insert(out.x.end(), r.x.begin(), r.x.end());
        out.w.insert(out.w.end(), r.w.begin(), r.w.end());
    }
    return out;
}

}  // namespace halfcrack
