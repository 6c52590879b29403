#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "halfcrack/geometry.hpp"
#include "halfcrack/slip_grid.hpp"

namespace halfcrack {

inline constexpr int kDefaultQuadOrder = 4;

/// Observation points on the surface x3 = 0 with the quadrature weights of
/// the discrete L^2(V) inner product.
struct SensorSet {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;

    /// Tensor grid over [x1_min, x1_max] x [x2_min, x2_max]; every sensor gets
    /// the same cell area h1*h2.
    static SensorSet grid(double x1_min, double x1_max, double x2_min, double x2_max, int n1,
                          int n2);

    int size() const { return static_cast<int>(points.size()); }
    Point3 point(int i) const { return {points[i][0], points[i][1], 0.0}; }
    Eigen::VectorXd weight_vector() const;
    /// Throws DomainError on empty sets, non-positive weights or duplicates.
    void validate() const;
};

/// Dirichlet data on V. Carries the sensor weights so the L^2(V) norm is
/// self-contained.
struct BoundaryData {
    Eigen::VectorXd values;
    Eigen::VectorXd weights;

    double l2v_norm() const;
    double l2v_dot(const BoundaryData& other) const;
    BoundaryData operator-(const BoundaryData& other) const;
};

/// Tensor Gauss-Legendre points on the parameter rectangle R, with the
/// bilinear basis values of the four cell corners at each point. The crack
/// height and the surface factor are applied per plane.
struct PlanarQuadrature {
    struct Point {
        double y1 = 0.0;
        double y2 = 0.0;
        double w = 0.0;  ///< dy1 dy2 weight
        std::array<int, 4> node{};  ///< global node index of the cell corners
        std::array<int, 4> dof{};  ///< interior dof index or -1
        std::array<double, 4> basis{};
    };
    RegionR region;
    int order = kDefaultQuadOrder;
    std::vector<Point> points;

    /// Slip value at point q.
    double slip_at(const Point& q, const SlipGrid& g) const;
};

PlanarQuadrature make_planar_quadrature(const RegionR& region, int order);

/// Dense discretization of the crack-to-boundary operator A_m.
struct ForwardMatrix {
    Eigen::MatrixXd entries;  ///< sensors x interior dofs
    Eigen::VectorXd weights;  ///< sensor weights
    PlaneParams m;
    int quad_order = kDefaultQuadOrder;
    RegionR region;

    BoundaryData apply(const SlipGrid& g) const;
    BoundaryData apply_dofs(const Eigen::VectorXd& dofs) const;
    /// W^{1/2} A, the matrix of A_m between Euclidean dof space and L^2(V).
    Eigen::MatrixXd weighted() const;
};

/// Throws DomainError unless the crack margin is positive and V non-empty.
ForwardMatrix assemble_A(const PlaneParams& m, const RegionR& region, const SensorSet& sensors,
                         int quad_order = kDefaultQuadOrder);

/// Columns d(A_m g)/da, d/db, d/dd from the closed-form kernel derivatives,
/// under the same quadrature as assemble_A.
std::array<BoundaryData, 3> assemble_dA_dm_applied(const PlaneParams& m, const RegionR& region,
                                                   const SensorSet& sensors, const SlipGrid& g,
                                                   int quad_order = kDefaultQuadOrder);

/// Euclidean distance from x to the crack patch Gamma_m.
double distance_to_patch(const PlaneParams& m, const RegionR& region, const Point3& x);

/// Weighted points of the double-layer integral, graded towards a reference
/// point. A cell is split while it lies within `kNearFactor` diameters of the
/// reference point and its diameter exceeds `min_diam`. Cells that are never
/// split use `quad_order`; split leaves use at least 8 points per axis.
struct FieldRule {
    static constexpr double kNearFactor = 1.5;
    static constexpr int kNearOrder = 8;

    std::vector<Point3> y;
    std::vector<double> coef;  ///< weight * slip, sigma absorbed in the normal
    Vec3 scaled_normal;

    double value(const Point3& x) const;
    double dx3(const Point3& x) const;
};

FieldRule build_field_rule(const PlaneParams& m, const SlipGrid& g, const Point3& x_ref,
                           int quad_order, double min_diam);

/// Double-layer field u(x). Throws DomainError when x3 > 0 or x lies within
/// 1e-6 * depth margin of the crack patch.
double eval_field(const PlaneParams& m, const SlipGrid& g, const Point3& x,
                  int quad_order = kDefaultQuadOrder);

/// Max over probes of |7-point FD Laplacian| * L^2 / |u|, L the distance of
/// the probe to the crack patch. One rule per probe serves its whole stencil.
double check_harmonic(const PlaneParams& m, const SlipGrid& g, const std::vector<Point3>& probes,
                      double h_fd, int quad_order = kDefaultQuadOrder);

struct NeumannCheck {
    double max_abs = 0.0;
    double max_rel = 0.0;  ///< relative to the summed magnitudes of the terms
};

/// Closed-form d u / d x3 at probes on x3 = 0.
NeumannCheck check_neumann_top(const PlaneParams& m, const SlipGrid& g,
                               const std::vector<Point3>& probes,
                               int quad_order = kDefaultQuadOrder);

struct JumpRecovery {
    std::vector<double> eps;
    std::vector<double> jumps;  ///< u(x0 + eps n) - u(x0 - eps n)
    double extrapolated = 0.0;
    double slip = 0.0;  ///< g at the crack point
};

/// Jump of u across the crack at (y1, y2) from eps-offset evaluations,
/// extrapolated to eps = 0.
JumpRecovery recover_jump(const PlaneParams& m, const SlipGrid& g, double y1, double y2,
                          const std::vector<double>& eps_list,
                          int quad_order = kDefaultQuadOrder);

}  // namespace halfcrack
