#include "halfcrack/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "halfcrack/errors.hpp"
#include "halfcrack/extrapolation.hpp"
#include "halfcrack/kernels.hpp"
#include "halfcrack/quadrature.hpp"

namespace halfcrack {

std::string_view to_string(JumpKind kind)
{
    switch (kind) {
    case JumpKind::J31: return "J31";
    case JumpKind::J32: return "J32";
    case JumpKind::J33: return "J33";
    case JumpKind::J34: return "J34";
    case JumpKind::J342: return "J342";
    case JumpKind::J35: return "J35";
    case JumpKind::J36: return "J36";
    case JumpKind::J343: return "J343";
    }
    return "?";
}

int kind_index(JumpKind kind)
{
    for (int k = 0; k < 8; ++k) {
        if (kAllJumpKinds[k] == kind) {
            return k;
        }
    }
    return -1;
}

PlaneFrame plane_frame(const PlaneParams& m)
{
    const CrackFrame f = make_frame(m);
    PlaneFrame pf;
    pf.origin = m.point(0.0, 0.0);
    pf.n = f.n;
    if (f.t) {
        pf.t = *f.t;
    } else {
        pf.t = Vec3::UnitX();
    }
    pf.s = pf.n.cross(pf.t);
    return pf;
}

double Bump::value(double x1, double x2) const
{
    const double s = ((x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2)) / (radius * radius);
    if (s >= 1.0) {
        return 0.0;
    }
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
}

std::array<double, 2> Bump::gradient(double x1, double x2) const
{
    const double rho2 = radius * radius;
    const double s = ((x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2)) / rho2;
    if (s >= 1.0) {
        return {0.0, 0.0};
    }
    const double f = amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
    const double fs = -f / ((1.0 - s) * (1.0 - s));
    return {fs * 2.0 * (x1 - c1) / rho2, fs * 2.0 * (x2 - c2) / rho2};
}

double Bump::laplacian(double x1, double x2) const
{
    const double rho2 = radius * radius;
    const double s = ((x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2)) / rho2;
    if (s >= 1.0) {
        return 0.0;
    }
    const double f = amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
    const double q = 1.0 - s;
    const double fs = -f / (q * q);
    const double fss = f / (q * q * q * q) - 2.0 * f / (q * q * q);
    return 4.0 / rho2 * (s * fss + fs);
}

std::array<double, 4> Bump::support_box() const
{
    return {c1 - radius, c1 + radius, c2 - radius, c2 + radius};
}

TestPair default_test_pair()
{
    TestPair p;
    p.g = Bump{0.0, 0.0, 1.0, 1.0};
    p.phi = Bump{0.3, 0.2, 0.8, 1.0};
    return p;
}

namespace {

constexpr double kInv4Pi = 1.0 / kFourPi;

// All eight jump kernels at r = z - y for unit normal n and tangent t.
struct KernelSet {
    std::array<double, 8> v{};
};

inline KernelSet jump_kernels(const Vec3& r, const Vec3& n, const Vec3& t, double nt)
{
    const double r2 = r.squaredNorm();
    const double inv_r2 = 1.0 / r2;
    const double inv3 = inv_r2 / std::sqrt(r2);
    const double inv5 = inv3 * inv_r2;
    const double rn = r.dot(n);
    const double rt = r.dot(t);
    KernelSet k;
    k.v[0] = rn * inv3;                                        // G(n)
    k.v[1] = (-nt + 3.0 * rn * rt * inv_r2) * inv3;            // d_y,t G(n)
    k.v[2] = rt * inv3;                                        // G(t)
    k.v[3] = (-1.0 + 3.0 * rn * rn * inv_r2) * inv3;           // d_y,n G(n)
    k.v[4] = -k.v[3];                                          // d_x,n G(n)
    k.v[5] = -(-nt + 3.0 * rt * rn * inv_r2) * inv3;           // d_x,n G(t)
    k.v[6] = (9.0 * rn - 15.0 * rn * rn * rn * inv_r2) * inv5; // d_x,n d_y,n G(n)
    k.v[7] = (3.0 * (2.0 * nt * rn + rt) - 15.0 * rn * rn * rt * inv_r2) * inv5;  // d_x,n d_y,t G(n)
    for (double& x : k.v) {
        x *= kInv4Pi;
    }
    return k;
}

struct InnerPoint {
    Point3 y;
    double wg = 0.0;
};

// Graded inner rule around the in-plane point (c1, c2).
class InnerBuilder {
public:
    InnerBuilder(const PlaneFrame& frame, const Bump& g, const JumpQuadrature& quad, double eps,
                 double c1, double c2, std::vector<InnerPoint>& out)
        : frame_(frame), g_(g), quad_(quad), eps_(eps), c1_(c1), c2_(c2), out_(out)
    {
    }

    void build()
    {
        const auto box = g_.support_box();
        const int n = quad_.inner_cells;
        const double h1 = (box[1] - box[0]) / n;
        const double h2 = (box[3] - box[2]) / n;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                visit(box[0] + i * h1, box[0] + (i + 1) * h1, box[2] + j * h2,
                      box[2] + (j + 1) * h2, 0);
            }
        }
    }

private:
    void visit(double u0, double u1, double v0, double v1, int depth)
    {
        // Skip cells entirely outside the support disk.
        const double cu = std::clamp(g_.c1, u0, u1);
        const double cv = std::clamp(g_.c2, v0, v1);
        if ((cu - g_.c1) * (cu - g_.c1) + (cv - g_.c2) * (cv - g_.c2) >= g_.radius * g_.radius) {
            return;
        }
        const double diam = std::hypot(u1 - u0, v1 - v0);
        const double mu = 0.5 * (u0 + u1);
        const double mv = 0.5 * (v0 + v1);
        const double dist = std::hypot(mu - c1_, mv - c2_);
        if (dist < quad_.near_factor * diam && diam > eps_ && depth < 40) {
            visit(u0, mu, v0, mv, depth + 1);
            visit(mu, u1, v0, mv, depth + 1);
            visit(u0, mu, mv, v1, depth + 1);
            visit(mu, u1, mv, v1, depth + 1);
            return;
        }
        const MappedRule ru = gauss_on(u0, u1, quad_.inner_order);
        const MappedRule rv = gauss_on(v0, v1, quad_.inner_order);
        for (size_t b = 0; b < rv.x.size(); ++b) {
            for (size_t a = 0; a < ru.x.size(); ++a) {
                const double gv = g_.value(ru.x[a], rv.x[b]);
                if (gv == 0.0) {
                    continue;
                }
                out_.push_back({frame_.at(ru.x[a], rv.x[b]), ru.w[a] * rv.w[b] * gv});
            }
        }
    }

    const PlaneFrame& frame_;
    const Bump& g_;
    const JumpQuadrature& quad_;
    double eps_;
    double c1_;
    double c2_;
    std::vector<InnerPoint>& out_;
};

}  // namespace

std::array<double, 8> lhs_eps_all(const PlaneParams& m, const TestPair& pair, double eps,
                                  const JumpQuadrature& quad)
{
    if (!(eps > 0.0)) {
        throw DomainError("jump evaluation needs eps > 0");
    }
    const double min_eps = 1e-4 * std::min(pair.g.radius, pair.phi.radius);
    if (eps < min_eps) {
        throw DomainError("eps below the refinement budget of the jump quadrature");
    }
    const PlaneFrame frame = plane_frame(m);
    const double nt = frame.n.dot(frame.t);
    const auto box = pair.phi.support_box();
    const MappedRule r1 = composite_gauss(box[0], box[1], quad.outer_cells, quad.outer_order);
    const MappedRule r2 = composite_gauss(box[2], box[3], quad.outer_cells, quad.outer_order);

    std::array<double, 8> total{};
    std::vector<InnerPoint> inner;
    for (size_t b = 0; b < r2.x.size(); ++b) {
        for (size_t a = 0; a < r1.x.size(); ++a) {
            const double phi = pair.phi.value(r1.x[a], r2.x[b]);
            if (phi == 0.0) {
                continue;
            }
            inner.clear();
            InnerBuilder(frame, pair.g, quad, eps, r1.x[a], r2.x[b], inner).build();
            const Point3 x = frame.at(r1.x[a], r2.x[b]);
            const Point3 zp = x + eps * frame.n;
            const Point3 zm = x - eps * frame.n;
            std::array<double, 8> acc{};
            for (const InnerPoint& ip : inner) {
                const KernelSet kp = jump_kernels(zp - ip.y, frame.n, frame.t, nt);
                const KernelSet km = jump_kernels(zm - ip.y, frame.n, frame.t, nt);
                for (int k = 0; k < 8; ++k) {
                    acc[k] += ip.wg * (kp.v[k] - km.v[k]);
                }
            }
            const double wphi = r1.w[a] * r2.w[b] * phi;
            for (int k = 0; k < 8; ++k) {
                total[k] += wphi * acc[k];
            }
        }
    }
    return total;
}

double lhs_eps(JumpKind kind, const PlaneParams& m, const TestPair& pair, double eps,
               const JumpQuadrature& quad)
{
    return lhs_eps_all(m, pair, eps, quad)[kind_index(kind)];
}

namespace {

template <typename F>
double integrate_over_overlap(const TestPair& pair, F&& integrand)
{
    const auto bg = pair.g.support_box();
    const auto bp = pair.phi.support_box();
    const double lo1 = std::max(bg[0], bp[0]);
    const double hi1 = std::min(bg[1], bp[1]);
    const double lo2 = std::max(bg[2], bp[2]);
    const double hi2 = std::min(bg[3], bp[3]);
    if (!(lo1 < hi1) || !(lo2 < hi2)) {
        return 0.0;
    }
    const MappedRule r1 = composite_gauss(lo1, hi1, 40, 10);
    const MappedRule r2 = composite_gauss(lo2, hi2, 40, 10);
    double sum = 0.0;
    for (size_t b = 0; b < r2.x.size(); ++b) {
        for (size_t a = 0; a < r1.x.size(); ++a) {
            sum += r1.w[a] * r2.w[b] * integrand(r1.x[a], r2.x[b]);
        }
    }
    return sum;
}

}  // namespace

double rhs_reference(JumpKind kind, const TestPair& pair)
{
    const Bump& g = pair.g;
    const Bump& phi = pair.phi;
    switch (kind) {
    case JumpKind::J31:
        return integrate_over_overlap(pair, [&](double u, double v) { return g.value(u, v) * phi.value(u, v); });
    case JumpKind::J32:
        return integrate_over_overlap(pair, [&](double u, double v) { return g.value(u, v) * phi.gradient(u, v)[0]; });
    case JumpKind::J35:
        return -integrate_over_overlap(pair, [&](double u, double v) { return g.value(u, v) * phi.gradient(u, v)[0]; });
    case JumpKind::J36:
        return integrate_over_overlap(pair, [&](double u, double v) { return g.value(u, v) * phi.laplacian(u, v); });
    case JumpKind::J33:
    case JumpKind::J34:
    case JumpKind::J342:
    case JumpKind::J343:
        return 0.0;
    }
    return 0.0;
}

double pairing_scale(const TestPair& pair)
{
    return integrate_over_overlap(pair, [&](double u, double v) {
        return std::abs(pair.g.value(u, v)) * std::abs(pair.phi.value(u, v));
    });
}

namespace {

void require_eps_sequence(const std::vector<double>& eps)
{
    if (eps.size() < 3) {
        throw DomainError("jump verification needs at least three eps values");
    }
    for (size_t k = 1; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0) || !(eps[k] < eps[k - 1])) {
            throw DomainError("eps sequence must be positive and strictly decreasing");
        }
    }
    const double ratio = eps[1] / eps[0];
    for (size_t k = 2; k < eps.size(); ++k) {
        if (std::abs(eps[k] / eps[k - 1] - ratio) > 1e-9 * ratio) {
            throw DomainError("eps sequence must be geometric");
        }
    }
}

JumpReport make_report(JumpKind kind, const std::vector<double>& eps,
                       const std::vector<double>& lhs, const TestPair& pair, double scale)
{
    JumpReport rep;
    rep.kind = kind;
    rep.eps = eps;
    rep.lhs = lhs;
    rep.rhs = rhs_reference(kind, pair);
    rep.extrapolated = richardson_to_zero(eps, lhs);
    const bool zero_rhs = kind == JumpKind::J33 || kind == JumpKind::J34 ||
                          kind == JumpKind::J342 || kind == JumpKind::J343;
    const double denom = zero_rhs ? std::max(std::abs(rep.rhs), scale) : std::abs(rep.rhs);
    if (denom > 0.0) {
        rep.rel_err = std::abs(rep.extrapolated - rep.rhs) / denom;
    } else {
        rep.rel_err = std::abs(rep.extrapolated - rep.rhs) > 0.0 ? 1.0 : 0.0;
    }
    const double floor = 1e-9 * std::max(std::abs(rep.rhs), scale);
    rep.first_order = true;
    for (size_t k = 0; k + 1 < lhs.size(); ++k) {
        const double e0 = std::abs(lhs[k] - rep.rhs);
        const double e1 = std::abs(lhs[k + 1] - rep.rhs);
        const double ratio = e1 > 0.0 ? e0 / e1 : std::numeric_limits<double>::infinity();
        rep.error_ratios.push_back(ratio);
        if (e1 <= floor && e0 <= floor) {
            continue;
        }
        if (!(ratio >= 1.5)) {
            rep.first_order = false;
        }
    }
    return rep;
}

}  // namespace

std::array<JumpReport, 8> verify_all_jumps(const PlaneParams& m, const TestPair& pair,
                                           const std::vector<double>& eps_list,
                                           const JumpQuadrature& quad)
{
    require_eps_sequence(eps_list);
    std::array<std::vector<double>, 8> lhs;
    for (double eps : eps_list) {
        const auto vals = lhs_eps_all(m, pair, eps, quad);
        for (int k = 0; k < 8; ++k) {
            lhs[k].push_back(vals[k]);
        }
    }
    const double scale = pairing_scale(pair);
    std::array<JumpReport, 8> out;
    for (int k = 0; k < 8; ++k) {
        out[k] = make_report(kAllJumpKinds[k], eps_list, lhs[k], pair, scale);
    }
    return out;
}

JumpReport verify_jump(JumpKind kind, const PlaneParams& m, const TestPair& pair,
                       const std::vector<double>& eps_list, const JumpQuadrature& quad)
{
    require_eps_sequence(eps_list);
    std::vector<double> lhs;
    for (double eps : eps_list) {
        lhs.push_back(lhs_eps(kind, m, pair, eps, quad));
    }
    return make_report(kind, eps_list, lhs, pair, pairing_scale(pair));
}

}  // namespace halfcrack
