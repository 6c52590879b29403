#include "halfcrack/kernels.hpp"

#include <cmath>

#include "halfcrack/errors.hpp"

namespace halfcrack {

namespace {

void require_distinct(double r2)
{
    if (!(r2 > 0.0)) {
        throw DomainError("kernel evaluated at coincident points");
    }
}

// (x-y).v / (4 pi |x-y|^3)
inline double g_of(const Vec3& r, const Vec3& v)
{
    const double r2 = r.squaredNorm();
    require_distinct(r2);
    const double rn = std::sqrt(r2);
    return r.dot(v) / (kFourPi * r2 * rn);
}

// d/dy3 of (x-y).v/|x-y|^3 with r = x-y: -v3/|r|^3 + 3 (r.v) r3 / |r|^5
inline double g_dy3_of(const Vec3& r, const Vec3& v)
{
    const double r2 = r.squaredNorm();
    require_distinct(r2);
    const double inv3 = 1.0 / (r2 * std::sqrt(r2));
    return (-v[2] + 3.0 * r.dot(v) * r[2] / r2) * inv3 / kFourPi;
}

}  // namespace

double free_space_green(const Point3& x, const Point3& y)
{
    const double r2 = (x - y).squaredNorm();
    require_distinct(r2);
    return 1.0 / (kFourPi * std::sqrt(r2));
}

double kernel_g(const Point3& x, const Point3& y, const Vec3& v)
{
    return g_of(x - y, v);
}

double kernel_h(const Point3& x, const Point3& y, const Vec3& v)
{
    return g_of(x - y, v) + g_of(reflect(x) - y, v);
}

double kernel_h_dy3(const Point3& x, const Point3& y, const Vec3& v)
{
    return g_dy3_of(x - y, v) + g_dy3_of(reflect(x) - y, v);
}

double kernel_h_dx3(const Point3& x, const Point3& y, const Vec3& v)
{
    // d/dx3 G(x,y,v) = -d/dy3 G(x,y,v); the image term picks up the chain
    // factor d(xbar3)/dx3 = -1, so the two contributions cancel at x3 = 0.
    return -g_dy3_of(x - y, v) + g_dy3_of(reflect(x) - y, v);
}

double kernel_g_dy(const Point3& x, const Point3& y, const Vec3& p, const Vec3& q)
{
    const Vec3 r = x - y;
    const double r2 = r.squaredNorm();
    require_distinct(r2);
    const double inv3 = 1.0 / (r2 * std::sqrt(r2));
    return (-p.dot(q) + 3.0 * r.dot(p) * r.dot(q) / r2) * inv3 / kFourPi;
}

double kernel_g_dx(const Point3& x, const Point3& y, const Vec3& p, const Vec3& w)
{
    return -kernel_g_dy(x, y, p, w);
}

double kernel_g_dxdy(const Point3& x, const Point3& y, const Vec3& p, const Vec3& q,
                     const Vec3& w)
{
    const Vec3 r = x - y;
    const double r2 = r.squaredNorm();
    require_distinct(r2);
    const double inv5 = 1.0 / (r2 * r2 * std::sqrt(r2));
    const double rp = r.dot(p);
    const double rq = r.dot(q);
    const double rw = r.dot(w);
    const double val = 3.0 * (p.dot(q) * rw + w.dot(p) * rq + rp * w.dot(q)) -
                       15.0 * rp * rq * rw / r2;
    return val * inv5 / kFourPi;
}

KernelDeriv kernel_h_dm(const Point3& x, double y1, double y2, const PlaneParams& m)
{
    const Point3 y = m.point(y1, y2);
    const Vec3 ns = m.scaled_normal();
    const double dy3 = kernel_h_dy3(x, y, ns);
    KernelDeriv out;
    out.d_a = y1 * dy3 - kernel_h(x, y, Vec3::UnitX());
    out.d_b = y2 * dy3 - kernel_h(x, y, Vec3::UnitY());
    out.d_d = dy3;
    return out;
}

}  // namespace halfcrack
