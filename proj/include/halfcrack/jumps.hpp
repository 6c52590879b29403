#pragma once

// Weak jump relations of the free-space double layer and its first and second
// derivatives across a planar open surface, checked by evaluating the
// eps-regularized double surface integrals
//
//   L(eps) = int_Gamma phi(x) int_Gamma [K(x + eps n, y) - K(x - eps n, y)] g(y) dS(y) dS(x)
//
// and extrapolating eps -> 0.

#include <array>
#include <string_view>
#include <vector>

#include "halfcrack/geometry.hpp"

namespace halfcrack {

/// The eight relations. The kernel K for each kind, with p, q, w the vectors
/// named in kernels.hpp:
///   J31  G(x,y,n)               -> int g phi
///   J32  d_y,t G(x,y,n)         -> int g d_t phi
///   J33  G(x,y,t)               -> 0
///   J34  d_y,n G(x,y,n)         -> 0
///   J342 d_x,n G(x,y,n)         -> 0
///   J35  d_x,n G(x,y,t)         -> -int g d_t phi
///   J36  d_x,n d_y,n G(x,y,n)   -> int g Lap_Gamma phi
///   J343 d_x,n d_y,t G(x,y,n)   -> 0
enum class JumpKind { J31, J32, J33, J34, J342, J35, J36, J343 };

inline constexpr std::array<JumpKind, 8> kAllJumpKinds = {
    JumpKind::J31, JumpKind::J32, JumpKind::J33, JumpKind::J34,
    JumpKind::J342, JumpKind::J35, JumpKind::J36, JumpKind::J343};

std::string_view to_string(JumpKind kind);
int kind_index(JumpKind kind);

/// Orthonormal frame of the plane: origin on the plane above (0,0), in-plane
/// axes `t` (tangent used by the jump kinds) and `s`, unit normal `n`.
struct PlaneFrame {
    Point3 origin;
    Vec3 t;
    Vec3 s;
    Vec3 n;

    Point3 at(double c1, double c2) const { return origin + c1 * t + c2 * s; }
};

/// Uses the projected-e3 tangent when the plane is tilted, otherwise e1.
PlaneFrame plane_frame(const PlaneParams& m);

/// Smooth bump amplitude * exp(1 - 1/(1 - r^2)), r = |c - center| / radius,
/// in in-plane coordinates c = (c1, c2). Zero with all derivatives at r = 1.
struct Bump {
    double c1 = 0.0;
    double c2 = 0.0;
    double radius = 1.0;
    double amplitude = 1.0;

    double value(double x1, double x2) const;
    std::array<double, 2> gradient(double x1, double x2) const;
    double laplacian(double x1, double x2) const;
    /// Bounding square of the support: {lo1, hi1, lo2, hi2}.
    std::array<double, 4> support_box() const;
};

/// Slip density g and test function phi, both in in-plane coordinates.
struct TestPair {
    Bump g;
    Bump phi;
};

/// Default pair: g of radius 1 at the origin, phi of radius 0.8 offset so
/// that int g d_t phi != 0.
TestPair default_test_pair();

struct JumpQuadrature {
    int outer_cells = 8;  ///< per axis over the phi support box
    int outer_order = 6;
    int inner_cells = 4;  ///< root cells per axis over the g support box
    int inner_order = 8;
    double near_factor = 2.0;  ///< split while center distance < near_factor * diam
};

/// L(eps) for all eight kinds at once (same quadrature points).
std::array<double, 8> lhs_eps_all(const PlaneParams& m, const TestPair& pair, double eps,
                                  const JumpQuadrature& quad = {});
double lhs_eps(JumpKind kind, const PlaneParams& m, const TestPair& pair, double eps,
               const JumpQuadrature& quad = {});

/// Right-hand side of the relation by high-order quadrature of closed forms.
double rhs_reference(JumpKind kind, const TestPair& pair);

/// int |g| |phi|, the scale used for the zero right-hand sides.
double pairing_scale(const TestPair& pair);

struct JumpReport {
    JumpKind kind = JumpKind::J31;
    std::vector<double> eps;
    std::vector<double> lhs;
    double extrapolated = 0.0;
    double rhs = 0.0;
    double rel_err = 0.0;
    /// |lhs(eps_k) - rhs| / |lhs(eps_{k+1}) - rhs| for consecutive eps.
    std::vector<double> error_ratios;
    /// True when every ratio is >= 1.5 or both errors sit below the noise floor.
    bool first_order = false;
};

/// Extrapolates L over eps_list (>= 3 entries, geometric, decreasing) and
/// compares with rhs_reference. Throws DomainError on a bad eps sequence.
JumpReport verify_jump(JumpKind kind, const PlaneParams& m, const TestPair& pair,
                       const std::vector<double>& eps_list, const JumpQuadrature& quad = {});

/// All kinds sharing one set of lhs evaluations.
std::array<JumpReport, 8> verify_all_jumps(const PlaneParams& m, const TestPair& pair,
                                           const std::vector<double>& eps_list,
                                           const JumpQuadrature& quad = {});

}  // namespace halfcrack
