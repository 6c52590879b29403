#include "halfcrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "halfcrack/errors.hpp"

namespace halfcrack {

void RegionR::validate() const
{
    if (!(x1_min < x1_max) || !(x2_min < x2_max)) {
        throw DomainError("region: bounds must satisfy x1_min < x1_max and x2_min < x2_max");
    }
    if (n1 < 3 || n2 < 3) {
        throw DomainError("region: node counts n1, n2 must be >= 3");
    }
}

std::array<std::array<double, 2>, 4> RegionR::corners() const
{
    return {{{x1_min, x2_min}, {x1_max, x2_min}, {x1_min, x2_max}, {x1_max, x2_max}}};
}

CrackFrame make_frame(const PlaneParams& m)
{
    CrackFrame f;
    f.sigma = std::sqrt(m.a * m.a + m.b * m.b + 1.0);
    f.n = m.scaled_normal() / f.sigma;
    f.alpha = 1.0 / f.sigma;
    if (m.a == 0.0 && m.b == 0.0) {
        f.beta_t = 0.0;
        return f;
    }
    // In-plane part of e3; its length is sqrt(1 - alpha^2) = sqrt(a^2+b^2)/sigma.
    const Vec3 e3(0.0, 0.0, 1.0);
    Vec3 tang = e3 - f.n[2] * f.n;
    const double len = tang.norm();
    f.t = tang / len;
    f.beta_t = len;
    return f;
}

double crack_depth_margin(const PlaneParams& m, const RegionR& region)
{
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& c : region.corners()) {
        top = std::max(top, m.height(c[0], c[1]));
    }
    return -top;
}

std::vector<GridNode> grid_nodes(const RegionR& region)
{
    region.validate();
    std::vector<GridNode> nodes;
    nodes.reserve(region.num_nodes());
    int dof = 0;
    for (int j = 0; j < region.n2; ++j) {
        for (int i = 0; i < region.n1; ++i) {
            GridNode node;
            node.x1 = region.node_x1(i);
            node.x2 = region.node_x2(j);
            node.boundary = (i == 0 || j == 0 || i == region.n1 - 1 || j == region.n2 - 1);
            node.dof = node.boundary ? -1 : dof++;
            nodes.push_back(node);
        }
    }
    return nodes;
}

void ParamBox::validate(const RegionR& region) const
{
    if (!(lo.a <= hi.a && lo.b <= hi.b && lo.d <= hi.d)) {
        throw DomainError("parameter box: lo must be <= hi componentwise");
    }
    if (!(beta_dist > 0.0)) {
        throw DomainError("parameter box: beta must be positive");
    }
    for (const auto& v : vertices()) {
        const double margin = crack_depth_margin(v, region);
        if (margin < beta_dist) {
            std::ostringstream os;
            os << "parameter box: vertex (a,b,d)=(" << v.a << "," << v.b << "," << v.d
               << ") puts the crack at distance " << margin
               << " from the surface x3=0, below the required beta=" << beta_dist;
            throw DomainError(os.str());
        }
    }
}

bool ParamBox::contains(const PlaneParams& m, double slack) const
{
    return m.a >= lo.a - slack && m.a <= hi.a + slack && m.b >= lo.b - slack &&
           m.b <= hi.b + slack && m.d >= lo.d - slack && m.d <= hi.d + slack;
}

PlaneParams ParamBox::clamp(const PlaneParams& m) const
{
    return {std::clamp(m.a, lo.a, hi.a), std::clamp(m.b, lo.b, hi.b),
            std::clamp(m.d, lo.d, hi.d)};
}

bool ParamBox::on_boundary(const PlaneParams& m, double tol) const
{
    auto near = [tol](double x, double bound) { return std::abs(x - bound) <= tol; };
    return near(m.a, lo.a) || near(m.a, hi.a) || near(m.b, lo.b) || near(m.b, hi.b) ||
           near(m.d, lo.d) || near(m.d, hi.d);
}

PlaneParams ParamBox::center() const
{
    return {0.5 * (lo.a + hi.a), 0.5 * (lo.b + hi.b), 0.5 * (lo.d + hi.d)};
}

std::array<PlaneParams, 8> ParamBox::vertices() const
{
    std::array<PlaneParams, 8> out;
    for (int k = 0; k < 8; ++k) {
        out[k] = {(k & 1) ? hi.a : lo.a, (k & 2) ? hi.b : lo.b, (k & 4) ? hi.d : lo.d};
    }
    return out;
}

namespace {

double node_coord(double lo, double hi, int k, int n)
{
    if (n == 1) {
        return 0.5 * (lo + hi);
    }
    return lo + (hi - lo) * k / (n - 1);
}

}  // namespace

std::vector<PlaneParams> ParamBox::grid(int na, int nb, int nd) const
{
    if (na < 1 || nb < 1 || nd < 1) {
        throw DomainError("parameter box grid: counts must be >= 1");
    }
    std::vector<PlaneParams> out;
    out.reserve(static_cast<size_t>(na) * nb * nd);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            for (int k = 0; k < nd; ++k) {
                out.push_back({node_coord(lo.a, hi.a, i, na), node_coord(lo.b, hi.b, j, nb),
                               node_coord(lo.d, hi.d, k, nd)});
            }
        }
    }
    return out;
}

std::vector<PlaneParams> ParamBox::cell_centers(int na, int nb, int nd) const
{
    if (na < 1 || nb < 1 || nd < 1) {
        throw DomainError("parameter box grid: counts must be >= 1");
    }
    auto c = [](double lo, double hi, int k, int n) { return lo + (hi - lo) * (k + 0.5) / n; };
    std::vector<PlaneParams> out;
    out.reserve(static_cast<size_t>(na) * nb * nd);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            for (int k = 0; k < nd; ++k) {
                out.push_back({c(lo.a, hi.a, i, na), c(lo.b, hi.b, j, nb), c(lo.d, hi.d, k, nd)});
            }
        }
    }
    return out;
}

double CrackGraph::height(double x1, double x2) const
{
    const double r2 = x1 * x1 + x2 * x2;
    if (r2 >= 1.0) {
        return -2.0;
    }
    const double root = std::sqrt(2.0 - r2);
    return kind_ == CapKind::Low ? -3.0 + root : -1.0 - root;
}

std::array<double, 2> CrackGraph::gradient(double x1, double x2) const
{
    const double r2 = x1 * x1 + x2 * x2;
    if (r2 >= 1.0) {
        return {0.0, 0.0};
    }
    const double s = (kind_ == CapKind::Low ? -1.0 : 1.0) / std::sqrt(2.0 - r2);
    return {s * x1, s * x2};
}

GraphPoint CrackGraph::point(double x1, double x2) const
{
    if (x1 * x1 + x2 * x2 >= radius() * radius()) {
        throw DomainError("graph crack: query point outside the disk footprint");
    }
    const auto grad = gradient(x1, x2);
    GraphPoint p;
    p.position = {x1, x2, height(x1, x2)};
    p.sigma = std::sqrt(1.0 + grad[0] * grad[0] + grad[1] * grad[1]);
    p.normal = Vec3(-grad[0], -grad[1], 1.0) / p.sigma;
    return p;
}

}  // namespace halfcrack
