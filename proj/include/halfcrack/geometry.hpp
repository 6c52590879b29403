#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace halfcrack {

using Vec3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;

/// Geometry triple m = (a, b, d) of the planar crack x3 = a*x1 + b*x2 + d.
struct PlaneParams {
    double a = 0.0;
    double b = 0.0;
    double d = -1.0;

    double height(double x1, double x2) const { return a * x1 + b * x2 + d; }
    Point3 point(double x1, double x2) const { return {x1, x2, height(x1, x2)}; }
    /// Unnormalized normal n*sigma = (-a, -b, 1).
    Vec3 scaled_normal() const { return {-a, -b, 1.0}; }

    Vec3 as_vector() const { return {a, b, d}; }
    static PlaneParams from_vector(const Vec3& v) { return {v[0], v[1], v[2]}; }

    friend bool operator==(const PlaneParams&, const PlaneParams&) = default;
};

/// Axis-aligned rectangle carrying the tensor node grid of the slip.
struct RegionR {
    double x1_min = -1.0;
    double x1_max = 1.0;
    double x2_min = -1.0;
    double x2_max = 1.0;
    int n1 = 9;
    int n2 = 9;

    /// Throws DomainError when bounds are inverted or a node count is below 3.
    void validate() const;

    double h1() const { return (x1_max - x1_min) / (n1 - 1); }
    double h2() const { return (x2_max - x2_min) / (n2 - 1); }
    double node_x1(int i) const { return x1_min + i * h1(); }
    double node_x2(int j) const { return x2_min + j * h2(); }
    int num_nodes() const { return n1 * n2; }
    int num_dofs() const { return (n1 - 2) * (n2 - 2); }
    std::array<std::array<double, 2>, 4> corners() const;

    friend bool operator==(const RegionR&, const RegionR&) = default;
};

/// Normal/tangent frame of a plane. `t` is empty for horizontal planes.
struct CrackFrame {
    Vec3 n;
    std::optional<Vec3> t;
    double sigma = 1.0;
    double alpha = 1.0;
    double beta_t = 0.0;
};

CrackFrame make_frame(const PlaneParams& m);

/// -max over the corners of R of (a x1 + b x2 + d). Positive iff the crack
/// patch lies strictly below the surface.
double crack_depth_margin(const PlaneParams& m, const RegionR& region);

struct GridNode {
    double x1 = 0.0;
    double x2 = 0.0;
    bool boundary = false;
    int dof = -1;  ///< interior dof index, -1 on the boundary
};

/// Row-major node list (x1 fastest).
std::vector<GridNode> grid_nodes(const RegionR& region);

/// Closed box of admissible plane parameters.
struct ParamBox {
    PlaneParams lo{-0.3, -0.3, -2.0};
    PlaneParams hi{0.3, 0.3, -1.2};
    double beta_dist = 0.5;

    /// Throws DomainError unless lo <= hi and every vertex keeps the crack
    /// at depth >= beta_dist below the surface.
    void validate(const RegionR& region) const;

    bool contains(const PlaneParams& m, double slack = 0.0) const;
    PlaneParams clamp(const PlaneParams& m) const;
    bool on_boundary(const PlaneParams& m, double tol = 1e-12) const;
    PlaneParams center() const;
    std::array<PlaneParams, 8> vertices() const;
    /// Node grid including the faces; counts must be >= 1 (1 gives the center).
    std::vector<PlaneParams> grid(int na, int nb, int nd) const;
    /// Cell-centred grid, never touching the faces.
    std::vector<PlaneParams> cell_centers(int na, int nb, int nd) const;
};

enum class CapKind { Low, High };

struct GraphPoint {
    Point3 position;
    Vec3 normal;
    double sigma = 1.0;
};

/// Lipschitz graph crack over the disk of radius 2: flat at x3 = -2 on the
/// annulus 1 <= r < 2 and a spherical cap for r < 1. The Low cap is the
/// upper part of the sphere centred at (0,0,-3), the High cap the lower part
/// of the sphere centred at (0,0,-1); both have radius sqrt(2).
class CrackGraph {
public:
    explicit CrackGraph(CapKind kind) : kind_(kind) {}

    CapKind kind() const { return kind_; }
    double radius() const { return 2.0; }

    double height(double x1, double x2) const;
    std::array<double, 2> gradient(double x1, double x2) const;
    /// Throws DomainError outside the open disk.
    GraphPoint point(double x1, double x2) const;

private:
    CapKind kind_;
};

}  // namespace halfcrack
