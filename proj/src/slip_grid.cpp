#include "halfcrack/slip_grid.hpp"

#include <algorithm>
#include <cmath>

#include "halfcrack/errors.hpp"

namespace halfcrack {

SlipGrid::SlipGrid(const RegionR& region) : region_(region)
{
    region_.validate();
    values_ = Eigen::VectorXd::Zero(region_.num_nodes());
}

SlipGrid SlipGrid::from_function(const RegionR& region,
                                 const std::function<double(double, double)>& f)
{
    SlipGrid g(region);
    for (int j = 1; j < region.n2 - 1; ++j) {
        for (int i = 1; i < region.n1 - 1; ++i) {
            g.values_[j * region.n1 + i] = f(region.node_x1(i), region.node_x2(j));
        }
    }
    return g;
}

SlipGrid SlipGrid::from_dofs(const RegionR& region, const Eigen::VectorXd& dofs)
{
    SlipGrid g(region);
    if (dofs.size() != region.num_dofs()) {
        throw DomainError("slip grid: dof vector has wrong length");
    }
    int k = 0;
    for (int j = 1; j < region.n2 - 1; ++j) {
        for (int i = 1; i < region.n1 - 1; ++i) {
            g.values_[j * region.n1 + i] = dofs[k++];
        }
    }
    return g;
}

void SlipGrid::set_node(int i, int j, double v)
{
    const bool boundary = i == 0 || j == 0 || i == region_.n1 - 1 || j == region_.n2 - 1;
    if (boundary && v != 0.0) {
        throw DomainError("slip grid: boundary nodes must stay zero");
    }
    values_[j * region_.n1 + i] = v;
}

Eigen::VectorXd SlipGrid::dofs() const
{
    Eigen::VectorXd out(region_.num_dofs());
    int k = 0;
    for (int j = 1; j < region_.n2 - 1; ++j) {
        for (int i = 1; i < region_.n1 - 1; ++i) {
            out[k++] = values_[j * region_.n1 + i];
        }
    }
    return out;
}

double SlipGrid::interpolate(double x1, double x2) const
{
    const RegionR& r = region_;
    if (x1 < r.x1_min || x1 > r.x1_max || x2 < r.x2_min || x2 > r.x2_max) {
        return 0.0;
    }
    const double u = (x1 - r.x1_min) / r.h1();
    const double v = (x2 - r.x2_min) / r.h2();
    const int i = std::min(static_cast<int>(u), r.n1 - 2);
    const int j = std::min(static_cast<int>(v), r.n2 - 2);
    const double s = u - i;
    const double t = v - j;
    return (1 - s) * (1 - t) * node(i, j) + s * (1 - t) * node(i + 1, j) +
           (1 - s) * t * node(i, j + 1) + s * t * node(i + 1, j + 1);
}

namespace {

// Q1 element matrices on a rectangle h1 x h2, local node order
// (0,0), (1,0), (0,1), (1,1).
void element_matrices(double h1, double h2, double ke[4][4], double me[4][4])
{
    const int ox[4] = {0, 1, 0, 1};
    const int oy[4] = {0, 0, 1, 1};
    for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 4; ++q) {
            const bool sx = ox[p] == ox[q];
            const bool sy = oy[p] == oy[q];
            // 1D mass: h/3 same node, h/6 other; 1D stiffness: 1/h, -1/h.
            const double mx = h1 * (sx ? 1.0 / 3.0 : 1.0 / 6.0);
            const double my = h2 * (sy ? 1.0 / 3.0 : 1.0 / 6.0);
            const double kx = (sx ? 1.0 : -1.0) / h1;
            const double ky = (sy ? 1.0 : -1.0) / h2;
            ke[p][q] = kx * my + mx * ky;
            me[p][q] = mx * my;
        }
    }
}

Eigen::MatrixXd assemble_gram(const RegionR& region, double stiff_weight, double mass_weight,
                              bool interior_only)
{
    const int n1 = region.n1;
    const int n2 = region.n2;
    auto dof_of = [&](int i, int j) -> int {
        if (!interior_only) {
            return j * n1 + i;
        }
        if (i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1) {
            return -1;
        }
        return (j - 1) * (n1 - 2) + (i - 1);
    };
    const int size = interior_only ? region.num_dofs() : region.num_nodes();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(size, size);
    double ke[4][4];
    double me[4][4];
    element_matrices(region.h1(), region.h2(), ke, me);
    for (int j = 0; j < n2 - 1; ++j) {
        for (int i = 0; i < n1 - 1; ++i) {
            const int loc[4] = {dof_of(i, j), dof_of(i + 1, j), dof_of(i, j + 1),
                                dof_of(i + 1, j + 1)};
            for (int p = 0; p < 4; ++p) {
                if (loc[p] < 0) {
                    continue;
                }
                for (int q = 0; q < 4; ++q) {
                    if (loc[q] < 0) {
                        continue;
                    }
                    k(loc[p], loc[q]) += stiff_weight * ke[p][q] + mass_weight * me[p][q];
                }
            }
        }
    }
    return k;
}

}  // namespace

Eigen::MatrixXd h1_gram(const RegionR& region)
{
    region.validate();
    return assemble_gram(region, 1.0, 1.0, true);
}

Eigen::MatrixXd l2_gram(const RegionR& region)
{
    region.validate();
    return assemble_gram(region, 0.0, 1.0, true);
}

double SlipGrid::h1_norm() const
{
    const Eigen::MatrixXd k = assemble_gram(region_, 1.0, 1.0, false);
    return std::sqrt(std::max(0.0, values_.dot(k * values_)));
}

double SlipGrid::l2_norm() const
{
    const Eigen::MatrixXd m = assemble_gram(region_, 0.0, 1.0, false);
    return std::sqrt(std::max(0.0, values_.dot(m * values_)));
}

SlipGrid SlipGrid::scaled(double factor) const
{
    SlipGrid out(*this);
    out.values_ *= factor;
    return out;
}

namespace slip_family {

std::function<double(double, double)> tent(const RegionR& region, double amplitude)
{
    const double c1 = 0.5 * (region.x1_min + region.x1_max);
    const double c2 = 0.5 * (region.x2_min + region.x2_max);
    const double r1 = 0.5 * (region.x1_max - region.x1_min);
    const double r2 = 0.5 * (region.x2_max - region.x2_min);
    return [=](double x1, double x2) {
        const double s1 = (x1 - c1) / r1;
        const double s2 = (x2 - c2) / r2;
        if (std::abs(s1) >= 1.0 || std::abs(s2) >= 1.0) {
            return 0.0;
        }
        return amplitude * (1.0 - s1 * s1) * (1.0 - s2 * s2);
    };
}

std::function<double(double, double)> bump(double c1, double c2, double radius,
                                           double amplitude)
{
    return [=](double x1, double x2) {
        const double r2 = ((x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2)) / (radius * radius);
        if (r2 >= 1.0) {
            return 0.0;
        }
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - r2));
    };
}

}  // namespace slip_family

}  // namespace halfcrack
