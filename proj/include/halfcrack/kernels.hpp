#pragma once

// Closed-form Laplace kernels for the half space x3 < 0.
//
//   Phi(x,y)   = 1 / (4 pi |x-y|)
//   G(x,y,v)   = grad_y Phi(x,y) . v = (x-y).v / (4 pi |x-y|^3)
//   H(x,y,v)   = G(x,y,v) + G(xbar,y,v),   xbar = (x1, x2, -x3)
//
// H is the double-layer kernel whose field has zero x3-derivative on the
// plane x3 = 0. All derivatives are hand-differentiated.

#include "halfcrack/geometry.hpp"

namespace halfcrack {

inline constexpr double kFourPi = 12.566370614359172953850573533118;

inline Point3 reflect(const Point3& x) { return {x[0], x[1], -x[2]}; }

double free_space_green(const Point3& x, const Point3& y);

double kernel_g(const Point3& x, const Point3& y, const Vec3& v);
double kernel_h(const Point3& x, const Point3& y, const Vec3& v);

/// d/dy3 of H(x, y, v) at fixed v.
double kernel_h_dy3(const Point3& x, const Point3& y, const Vec3& v);
/// d/dx3 of H(x, y, v) at fixed v. Vanishes identically on x3 = 0.
double kernel_h_dx3(const Point3& x, const Point3& y, const Vec3& v);

/// Free-space derivative kernels used by the jump formulas.
/// Derivative of G(x,y,p) in y along q.
double kernel_g_dy(const Point3& x, const Point3& y, const Vec3& p, const Vec3& q);
/// Derivative of G(x,y,p) in x along w.
double kernel_g_dx(const Point3& x, const Point3& y, const Vec3& p, const Vec3& w);
/// Derivative in x along w of the y-derivative along q of G(x,y,p).
double kernel_g_dxdy(const Point3& x, const Point3& y, const Vec3& p, const Vec3& q,
                     const Vec3& w);

struct KernelDeriv {
    double d_a = 0.0;
    double d_b = 0.0;
    double d_d = 0.0;
};

/// Derivatives in (a, b, d) of H(x, y(m), n sigma) at fixed (y1, y2), where
/// y(m) = (y1, y2, a y1 + b y2 + d) and n sigma = (-a, -b, 1).
KernelDeriv kernel_h_dm(const Point3& x, double y1, double y2, const PlaneParams& m);

}  // namespace halfcrack
