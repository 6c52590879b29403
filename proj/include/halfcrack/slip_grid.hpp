#pragma once

#include <functional>

#include <Eigen/Core>

#include "halfcrack/geometry.hpp"

namespace halfcrack {

/// Nodal values of a piecewise-bilinear slip on the tensor grid of R,
/// pinned to zero on the boundary nodes (a conforming H^1_0(R) function).
class SlipGrid {
public:
    explicit SlipGrid(const RegionR& region);

    /// Samples f at the interior nodes; boundary nodes are set to zero.
    static SlipGrid from_function(const RegionR& region,
                                  const std::function<double(double, double)>& f);
    static SlipGrid from_dofs(const RegionR& region, const Eigen::VectorXd& dofs);

    const RegionR& region() const { return region_; }
    /// All n1*n2 nodal values, row-major with x1 fastest.
    const Eigen::VectorXd& values() const { return values_; }
    double node(int i, int j) const { return values_[j * region_.n1 + i]; }
    /// Throws DomainError when a non-zero value is put on a boundary node.
    void set_node(int i, int j, double v);

    /// Interior values in dof order.
    Eigen::VectorXd dofs() const;

    /// Bilinear interpolant; zero outside R.
    double interpolate(double x1, double x2) const;

    /// sqrt(int |grad g|^2 + int g^2) of the interpolant, computed exactly.
    double h1_norm() const;
    double l2_norm() const;

    SlipGrid scaled(double factor) const;

private:
    RegionR region_;
    Eigen::VectorXd values_;
};

/// Stiffness-plus-mass matrix of the bilinear element on interior dofs, so
/// that g.dofs()' K g.dofs() = h1_norm()^2.
Eigen::MatrixXd h1_gram(const RegionR& region);
/// Mass matrix alone on interior dofs.
Eigen::MatrixXd l2_gram(const RegionR& region);

/// Smooth closed-form slip families, all vanishing on the boundary of R.
namespace slip_family {

/// amplitude * (1 - s1^2)(1 - s2^2) with s the coordinates mapped to [-1, 1]^2.
std::function<double(double, double)> tent(const RegionR& region, double amplitude);

/// amplitude * exp(1 - 1/(1 - r^2)) with r = |x - c| / radius, zero for r >= 1.
std::function<double(double, double)> bump(double c1, double c2, double radius,
                                           double amplitude);

}  // namespace slip_family

}  // namespace halfcrack
