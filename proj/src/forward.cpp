#include "halfcrack/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "halfcrack/errors.hpp"
#include "halfcrack/extrapolation.hpp"
#include "halfcrack/kernels.hpp"
#include "halfcrack/quadrature.hpp"

namespace halfcrack {

SensorSet SensorSet::grid(double x1_min, double x1_max, double x2_min, double x2_max, int n1,
                          int n2)
{
    if (n1 < 2 || n2 < 2 || !(x1_min < x1_max) || !(x2_min < x2_max)) {
        throw DomainError("sensor grid: need n1, n2 >= 2 and increasing bounds");
    }
    SensorSet s;
    const double h1 = (x1_max - x1_min) / (n1 - 1);
    const double h2 = (x2_max - x2_min) / (n2 - 1);
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            s.points.push_back({x1_min + i * h1, x2_min + j * h2});
            s.weights.push_back(h1 * h2);
        }
    }
    return s;
}

Eigen::VectorXd SensorSet::weight_vector() const
{
    return Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

void SensorSet::validate() const
{
    if (points.empty()) {
        throw DomainError("sensor set is empty");
    }
    if (points.size() != weights.size()) {
        throw DomainError("sensor set: one weight per sensor required");
    }
    for (double w : weights) {
        if (!(w > 0.0)) {
            throw DomainError("sensor set: weights must be positive");
        }
    }
    std::set<std::array<double, 2>> seen(points.begin(), points.end());
    if (seen.size() != points.size()) {
        throw DomainError("sensor set: sensor points must be pairwise distinct");
    }
}

double BoundaryData::l2v_norm() const
{
    return std::sqrt(std::max(0.0, l2v_dot(*this)));
}

double BoundaryData::l2v_dot(const BoundaryData& other) const
{
    return (weights.array() * values.array() * other.values.array()).sum();
}

BoundaryData BoundaryData::operator-(const BoundaryData& other) const
{
    return {values - other.values, weights};
}

double PlanarQuadrature::slip_at(const Point& q, const SlipGrid& g) const
{
    const Eigen::VectorXd& v = g.values();
    return q.basis[0] * v[q.node[0]] + q.basis[1] * v[q.node[1]] + q.basis[2] * v[q.node[2]] +
           q.basis[3] * v[q.node[3]];
}

PlanarQuadrature make_planar_quadrature(const RegionR& region, int order)
{
    region.validate();
    PlanarQuadrature pq;
    pq.region = region;
    pq.order = order;
    const GaussRule& rule = gauss_legendre(order);
    const double h1 = region.h1();
    const double h2 = region.h2();
    const int n1 = region.n1;
    const int n2 = region.n2;
    auto dof_of = [&](int i, int j) {
        if (i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1) {
            return -1;
        }
        return (j - 1) * (n1 - 2) + (i - 1);
    };
    pq.points.reserve(static_cast<size_t>(n1 - 1) * (n2 - 1) * order * order);
    for (int j = 0; j < n2 - 1; ++j) {
        for (int i = 0; i < n1 - 1; ++i) {
            for (int qj = 0; qj < order; ++qj) {
                const double t = 0.5 * (1.0 + rule.nodes[qj]);
                for (int qi = 0; qi < order; ++qi) {
                    const double s = 0.5 * (1.0 + rule.nodes[qi]);
                    PlanarQuadrature::Point p;
                    p.y1 = region.node_x1(i) + s * h1;
                    p.y2 = region.node_x2(j) + t * h2;
                    p.w = 0.25 * rule.weights[qi] * rule.weights[qj] * h1 * h2;
                    p.node = {j * n1 + i, j * n1 + i + 1, (j + 1) * n1 + i, (j + 1) * n1 + i + 1};
                    p.dof = {dof_of(i, j), dof_of(i + 1, j), dof_of(i, j + 1), dof_of(i + 1, j + 1)};
                    p.basis = {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
                    pq.points.push_back(p);
                }
            }
        }
    }
    return pq;
}

BoundaryData ForwardMatrix::apply(const SlipGrid& g) const
{
    if (!(g.region() == region)) {
        throw DomainError("forward matrix: slip grid does not match the assembly region");
    }
    return apply_dofs(g.dofs());
}

BoundaryData ForwardMatrix::apply_dofs(const Eigen::VectorXd& dofs) const
{
    return {entries * dofs, weights};
}

Eigen::MatrixXd ForwardMatrix::weighted() const
{
    return weights.array().sqrt().matrix().asDiagonal() * entries;
}

namespace {

void require_admissible(const PlaneParams& m, const RegionR& region)
{
    const double margin = crack_depth_margin(m, region);
    if (!(margin > 0.0)) {
        std::ostringstream os;
        os << "crack plane (a,b,d)=(" << m.a << "," << m.b << "," << m.d
           << ") reaches the surface: distance to x3=0 is " << margin << " (must be > 0)";
        throw DomainError(os.str());
    }
}

}  // namespace

ForwardMatrix assemble_A(const PlaneParams& m, const RegionR& region, const SensorSet& sensors,
                         int quad_order)
{
    region.validate();
    require_admissible(m, region);
    sensors.validate();
    const PlanarQuadrature pq = make_planar_quadrature(region, quad_order);
    const Vec3 ns = m.scaled_normal();

    ForwardMatrix fm;
    fm.m = m;
    fm.quad_order = quad_order;
    fm.region = region;
    fm.weights = sensors.weight_vector();
    fm.entries = Eigen::MatrixXd::Zero(sensors.size(), region.num_dofs());
    for (int s = 0; s < sensors.size(); ++s) {
        const Point3 x = sensors.point(s);
        for (const auto& q : pq.points) {
            const double k = q.w * kernel_h(x, m.point(q.y1, q.y2), ns);
            for (int c = 0; c < 4; ++c) {
                if (q.dof[c] >= 0) {
                    fm.entries(s, q.dof[c]) += k * q.basis[c];
                }
            }
        }
    }
    return fm;
}

std::array<BoundaryData, 3> assemble_dA_dm_applied(const PlaneParams& m, const RegionR& region,
                                                   const SensorSet& sensors, const SlipGrid& g,
                                                   int quad_order)
{
    region.validate();
    require_admissible(m, region);
    sensors.validate();
    if (!(g.region() == region)) {
        throw DomainError("slip grid does not match the region");
    }
    const PlanarQuadrature pq = make_planar_quadrature(region, quad_order);
    std::vector<double> slip(pq.points.size());
    for (size_t k = 0; k < pq.points.size(); ++k) {
        slip[k] = pq.points[k].w * pq.slip_at(pq.points[k], g);
    }
    const Eigen::VectorXd w = sensors.weight_vector();
    std::array<BoundaryData, 3> cols;
    for (auto& c : cols) {
        c.values = Eigen::VectorXd::Zero(sensors.size());
        c.weights = w;
    }
    for (int s = 0; s < sensors.size(); ++s) {
        const Point3 x = sensors.point(s);
        double da = 0.0;
        double db = 0.0;
        double dd = 0.0;
        for (size_t k = 0; k < pq.points.size(); ++k) {
            if (slip[k] == 0.0) {
                continue;
            }
            const KernelDeriv kd = kernel_h_dm(x, pq.points[k].y1, pq.points[k].y2, m);
            da += slip[k] * kd.d_a;
            db += slip[k] * kd.d_b;
            dd += slip[k] * kd.d_d;
        }
        cols[0].values[s] = da;
        cols[1].values[s] = db;
        cols[2].values[s] = dd;
    }
    return cols;
}

double distance_to_patch(const PlaneParams& m, const RegionR& region, const Point3& x)
{
    const double a = m.a;
    const double b = m.b;
    const double c = m.d - x[2];
    auto dist2 = [&](double u, double v) {
        const double dz = a * u + b * v + c;
        return (u - x[0]) * (u - x[0]) + (v - x[1]) * (v - x[1]) + dz * dz;
    };
    // Unconstrained minimizer of |P(u,v) - x|^2.
    const double m11 = 1.0 + a * a;
    const double m12 = a * b;
    const double m22 = 1.0 + b * b;
    const double r1 = x[0] - a * c;
    const double r2 = x[1] - b * c;
    const double det = m11 * m22 - m12 * m12;
    const double u = (m22 * r1 - m12 * r2) / det;
    const double v = (m11 * r2 - m12 * r1) / det;
    if (u >= region.x1_min && u <= region.x1_max && v >= region.x2_min && v <= region.x2_max) {
        return std::sqrt(dist2(u, v));
    }
    double best = std::numeric_limits<double>::infinity();
    for (double ue : {region.x1_min, region.x1_max}) {
        const double ve = std::clamp((r2 - m12 * ue) / m22, region.x2_min, region.x2_max);
        best = std::min(best, dist2(ue, ve));
    }
    for (double ve : {region.x2_min, region.x2_max}) {
        const double ue = std::clamp((r1 - m12 * ve) / m11, region.x1_min, region.x1_max);
        best = std::min(best, dist2(ue, ve));
    }
    return std::sqrt(best);
}

double FieldRule::value(const Point3& x) const
{
    double u = 0.0;
    for (size_t k = 0; k < y.size(); ++k) {
        u += coef[k] * kernel_h(x, y[k], scaled_normal);
    }
    return u;
}

double FieldRule::dx3(const Point3& x) const
{
    double u = 0.0;
    for (size_t k = 0; k < y.size(); ++k) {
        u += coef[k] * kernel_h_dx3(x, y[k], scaled_normal);
    }
    return u;
}

namespace {

struct RuleBuilder {
    const PlaneParams& m;
    const SlipGrid& g;
    const Point3& x_ref;
    int quad_order;
    double min_diam;
    FieldRule& rule;

    static constexpr int kMaxDepth = 48;

    void add_leaf(int i, int j, double u0, double u1, double v0, double v1, int order)
    {
        const RegionR& r = g.region();
        const MappedRule ru = gauss_on(u0, u1, order);
        const MappedRule rv = gauss_on(v0, v1, order);
        const double x1i = r.node_x1(i);
        const double x2j = r.node_x2(j);
        const double g00 = g.node(i, j);
        const double g10 = g.node(i + 1, j);
        const double g01 = g.node(i, j + 1);
        const double g11 = g.node(i + 1, j + 1);
        if (g00 == 0.0 && g10 == 0.0 && g01 == 0.0 && g11 == 0.0) {
            return;
        }
        for (int b = 0; b < order; ++b) {
            const double t = (rv.x[b] - x2j) / r.h2();
            for (int a = 0; a < order; ++a) {
                const double s = (ru.x[a] - x1i) / r.h1();
                const double slip = (1 - s) * (1 - t) * g00 + s * (1 - t) * g10 +
                                    (1 - s) * t * g01 + s * t * g11;
                rule.y.push_back(m.point(ru.x[a], rv.x[b]));
                rule.coef.push_back(ru.w[a] * rv.w[b] * slip);
            }
        }
    }

    void visit(int i, int j, double u0, double u1, double v0, double v1, int depth)
    {
        const Point3 p00 = m.point(u0, v0);
        const Point3 p11 = m.point(u1, v1);
        const Point3 p10 = m.point(u1, v0);
        const Point3 p01 = m.point(u0, v1);
        const double diam = std::max((p11 - p00).norm(), (p10 - p01).norm());
        const Point3 center = m.point(0.5 * (u0 + u1), 0.5 * (v0 + v1));
        const bool near = (x_ref - center).norm() < FieldRule::kNearFactor * diam;
        if (near && diam > min_diam && depth < kMaxDepth) {
            const double um = 0.5 * (u0 + u1);
            const double vm = 0.5 * (v0 + v1);
            visit(i, j, u0, um, v0, vm, depth + 1);
            visit(i, j, um, u1, v0, vm, depth + 1);
            visit(i, j, u0, um, vm, v1, depth + 1);
            visit(i, j, um, u1, vm, v1, depth + 1);
            return;
        }
        const int order = depth == 0 ? quad_order : std::max(quad_order, FieldRule::kNearOrder);
        add_leaf(i, j, u0, u1, v0, v1, order);
    }
};

}  // namespace

FieldRule build_field_rule(const PlaneParams& m, const SlipGrid& g, const Point3& x_ref,
                           int quad_order, double min_diam)
{
    const RegionR& r = g.region();
    FieldRule rule;
    rule.scaled_normal = m.scaled_normal();
    RuleBuilder builder{m, g, x_ref, quad_order, min_diam, rule};
    for (int j = 0; j < r.n2 - 1; ++j) {
        for (int i = 0; i < r.n1 - 1; ++i) {
            builder.visit(i, j, r.node_x1(i), r.node_x1(i + 1), r.node_x2(j), r.node_x2(j + 1), 0);
        }
    }
    return rule;
}

namespace {

void require_field_point(const PlaneParams& m, const RegionR& region, const Point3& x)
{
    require_admissible(m, region);
    if (x[2] > 0.0) {
        throw DomainError("field point must satisfy x3 <= 0");
    }
    const double margin = crack_depth_margin(m, region);
    if (distance_to_patch(m, region, x) <= 1e-6 * margin) {
        throw DomainError("field point lies on the crack patch");
    }
}

}  // namespace

double eval_field(const PlaneParams& m, const SlipGrid& g, const Point3& x, int quad_order)
{
    require_field_point(m, g.region(), x);
    return build_field_rule(m, g, x, quad_order, 0.0).value(x);
}

double check_harmonic(const PlaneParams& m, const SlipGrid& g, const std::vector<Point3>& probes,
                      double h_fd, int quad_order)
{
    double worst = 0.0;
    for (const Point3& x : probes) {
        require_field_point(m, g.region(), x);
        const double dist = distance_to_patch(m, g.region(), x);
        if (dist < 10.0 * h_fd || x[2] > -10.0 * h_fd) {
            throw DomainError("harmonicity probe closer than 10 h_fd to the crack or the surface");
        }
        const FieldRule rule = build_field_rule(m, g, x, quad_order, 0.0);
        const double u0 = rule.value(x);
        double sum = -6.0 * u0;
        for (int axis = 0; axis < 3; ++axis) {
            const Vec3 offset = h_fd * Vec3::Unit(axis);
            sum += rule.value(x + offset) + rule.value(x - offset);
        }
        const double lap = sum / (h_fd * h_fd);
        const double denom = std::max(std::abs(u0), std::numeric_limits<double>::min());
        if (u0 == 0.0 && lap == 0.0) {
            continue;
        }
        worst = std::max(worst, std::abs(lap) * dist * dist / denom);
    }
    return worst;
}

NeumannCheck check_neumann_top(const PlaneParams& m, const SlipGrid& g,
                               const std::vector<Point3>& probes, int quad_order)
{
    NeumannCheck out;
    const Vec3 e3 = Vec3::UnitZ();
    for (const Point3& x : probes) {
        if (x[2] != 0.0) {
            throw DomainError("Neumann probes must lie on x3 = 0");
        }
        require_field_point(m, g.region(), x);
        const FieldRule rule = build_field_rule(m, g, x, quad_order, 0.0);
        double dx3 = 0.0;
        double scale = 0.0;
        for (size_t k = 0; k < rule.y.size(); ++k) {
            dx3 += rule.coef[k] * kernel_h_dx3(x, rule.y[k], rule.scaled_normal);
            scale += std::abs(rule.coef[k] * kernel_g_dx(x, rule.y[k], rule.scaled_normal, e3));
        }
        out.max_abs = std::max(out.max_abs, std::abs(dx3));
        if (scale > 0.0) {
            out.max_rel = std::max(out.max_rel, std::abs(dx3) / scale);
        }
    }
    return out;
}

JumpRecovery recover_jump(const PlaneParams& m, const SlipGrid& g, double y1, double y2,
                          const std::vector<double>& eps_list, int quad_order)
{
    const RegionR& r = g.region();
    if (y1 <= r.x1_min || y1 >= r.x1_max || y2 <= r.x2_min || y2 >= r.x2_max) {
        throw DomainError("jump recovery point must be interior to R");
    }
    require_admissible(m, r);
    const CrackFrame frame = make_frame(m);
    const Point3 x0 = m.point(y1, y2);
    JumpRecovery out;
    out.eps = eps_list;
    out.slip = g.interpolate(y1, y2);
    for (double eps : eps_list) {
        const FieldRule rule = build_field_rule(m, g, x0, quad_order, 0.25 * eps);
        out.jumps.push_back(rule.value(x0 + eps * frame.n) - rule.value(x0 - eps * frame.n));
    }
    out.extrapolated = richardson_to_zero(out.eps, out.jumps);
    return out;
}

}  // namespace halfcrack
