#include "halfcrack/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "halfcrack/errors.hpp"
#include "halfcrack/kernels.hpp"
#include "halfcrack/quadrature.hpp"

namespace halfcrack {

double CounterexampleSetup::slip(double x1, double x2)
{
    const double r2 = x1 * x1 + x2 * x2;
    if (r2 < 1.0) {
        return 3.0;
    }
    if (r2 < 4.0) {
        return 4.0 - r2;
    }
    return 0.0;
}

bool CounterexampleSetup::inside_lens(const Point3& x)
{
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 >= 1.0) {
        return false;
    }
    const CrackGraph low(CapKind::Low);
    const CrackGraph high(CapKind::High);
    return x[2] < low.height(x[0], x[1]) && x[2] > high.height(x[0], x[1]);
}

void CounterexampleSetup::validate() const
{
    if (cap_nodes_r < 1 || annulus_nodes_r < 1 || nodes_theta < 1) {
        throw DomainError("counterexample quadrature: node counts must be >= 1");
    }
}

CounterexampleSetup CounterexampleSetup::refined(int factor) const
{
    CounterexampleSetup s = *this;
    s.cap_nodes_r *= factor;
    s.annulus_nodes_r *= factor;
    s.nodes_theta *= factor;
    return s;
}

namespace {

enum class Quantity { Value, Dx3 };

double integrate(CapKind which, const Point3& x, const CounterexampleSetup& setup, Quantity q)
{
    setup.validate();
    if (x[2] > 0.0) {
        throw DomainError("counterexample field: point lies above the surface");
    }
    const CrackGraph graph(which);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 < 4.0 && std::abs(x[2] - graph.height(x[0], x[1])) < 1e-12) {
        throw DomainError("counterexample field: point lies on the crack");
    }
    const double dtheta = 2.0 * std::numbers::pi / setup.nodes_theta;
    double sum = 0.0;
    for (int panel = 0; panel < 2; ++panel) {
        const MappedRule rr = panel == 0 ? gauss_on(0.0, 1.0, setup.cap_nodes_r)
                                         : gauss_on(1.0, 2.0, setup.annulus_nodes_r);
        for (size_t k = 0; k < rr.x.size(); ++k) {
            const double r = rr.x[k];
            for (int j = 0; j < setup.nodes_theta; ++j) {
                const double theta = (j + 0.5) * dtheta;
                const double y1 = r * std::cos(theta);
                const double y2 = r * std::sin(theta);
                const auto grad = graph.gradient(y1, y2);
                const Point3 y{y1, y2, graph.height(y1, y2)};
                const Vec3 ns{-grad[0], -grad[1], 1.0};
                const double w = rr.w[k] * r * dtheta * CounterexampleSetup::slip(y1, y2);
                sum += w * (q == Quantity::Value ? kernel_h(x, y, ns) : kernel_h_dx3(x, y, ns));
            }
        }
    }
    return sum;
}

}  // namespace

double eval_counterexample_field(CapKind which, const Point3& x, const CounterexampleSetup& setup)
{
    return integrate(which, x, setup, Quantity::Value);
}

double eval_counterexample_dx3(CapKind which, const Point3& x, const CounterexampleSetup& setup)
{
    return integrate(which, x, setup, Quantity::Dx3);
}

Indistinguishability verify_indistinguishable(const SensorSet& sensors,
                                              const CounterexampleSetup& setup)
{
    if (sensors.size() == 0) {
        throw DomainError("counterexample comparison: no sensors");
    }
    Indistinguishability out;
    for (int i = 0; i < sensors.size(); ++i) {
        const Point3 x = sensors.point(i);
        const double u1 = eval_counterexample_field(CapKind::Low, x, setup);
        const double u2 = eval_counterexample_field(CapKind::High, x, setup);
        const double d1 = eval_counterexample_dx3(CapKind::Low, x, setup);
        const double d2 = eval_counterexample_dx3(CapKind::High, x, setup);
        out.max_diff = std::max(out.max_diff, std::abs(u1 - u2));
        out.max_dx3_diff = std::max(out.max_dx3_diff, std::abs(d1 - d2));
        out.scale = std::max(out.scale, std::abs(u1));
    }
    return out;
}

}  // namespace halfcrack
