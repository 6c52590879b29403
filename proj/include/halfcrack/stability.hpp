#pragma once

// Quantitative side of plane identification: the data map phi(m) = A_m h for
// a fixed slip h, its Jacobian in m, projections onto the numerical range of
// A_m and the residual and Lipschitz scans built on them.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "halfcrack/forward.hpp"
#include "halfcrack/geometry.hpp"
#include "halfcrack/slip_grid.hpp"

namespace halfcrack {

inline constexpr double kDefaultTau = 1e-8;
inline constexpr double kDefaultLambdaRel = 1e-10;

/// phi(m) = A_m h with a fixed slip h. Forward matrices are cached per m, so
/// repeated evaluations at the same m are cheap. Safe to share across threads.
class PhiMap {
public:
    PhiMap(SlipGrid h, SensorSet sensors, int quad_order = kDefaultQuadOrder,
           std::size_t cache_limit = 512);

    const SlipGrid& slip() const { return h_; }
    const RegionR& region() const { return h_.region(); }
    const SensorSet& sensors() const { return sensors_; }
    int quad_order() const { return quad_order_; }

    /// Cached A_m. Throws DomainError when the plane reaches the surface.
    std::shared_ptr<const ForwardMatrix> matrix(const PlaneParams& m) const;
    BoundaryData operator()(const PlaneParams& m) const;

private:
    SlipGrid h_;
    SensorSet sensors_;
    int quad_order_;
    std::size_t cache_limit_;
    mutable std::mutex mutex_;
    mutable std::map<std::array<double, 3>, std::shared_ptr<const ForwardMatrix>> cache_;
};

BoundaryData phi(const PhiMap& map, const PlaneParams& m);

struct PhiJacobian {
    PlaneParams m;
    std::array<BoundaryData, 3> columns;  ///< d/da, d/db, d/dd

    /// Weighted L^2(V) Gram matrix of the columns.
    Eigen::Matrix3d gram() const;
    /// Sum of q_k times column k.
    BoundaryData directional(const Vec3& q) const;
};

PhiJacobian phi_jacobian(const PhiMap& map, const PlaneParams& m);

/// Smallest eigenvalue of the 3x3 Gram matrix. Positive means full rank.
double gram_min_eig(const PhiJacobian& jac);

/// sigma_k / sigma_1 of W^{1/2} A in decreasing order.
Eigen::VectorXd relative_singular_values(const ForwardMatrix& A);

/// Orthogonal projector of L^2(V) onto the span of the left singular
/// vectors of W^{1/2} A with sigma_k >= tau * sigma_1.
struct RangeProjector {
    Eigen::MatrixXd basis;  ///< orthonormal columns in the W^{1/2}-scaled space
    Eigen::VectorXd sqrt_weights;
    Eigen::VectorXd singular_values;  ///< all of them, decreasing
    double tau = kDefaultTau;

    int rank() const { return static_cast<int>(basis.cols()); }
    BoundaryData apply(const BoundaryData& y) const;
    /// (I - P) y
    BoundaryData complement(const BoundaryData& y) const;
};

/// Throws DomainError unless tau is in (0, 1), NumericalError if nothing
/// survives the truncation.
RangeProjector range_projector(const ForwardMatrix& A, double tau = kDefaultTau);

enum class ResidualMode { Projection, Regularized };

struct ResidualSettings {
    double tau = kDefaultTau;
    /// H^1 penalty as a multiple of sigma_1^2 of W^{1/2} A.
    double lambda_rel = kDefaultLambdaRel;
};

struct ResidualValue {
    double value = 0.0;
    double lambda = 0.0;  ///< absolute penalty used (regularized mode only)
    int rank = 0;  ///< retained rank (projection mode only)
};

/// Distance of y to the range of A. Projection mode returns |(I - P) y|;
/// regularized mode minimizes |A h - y|^2 + lambda |h|_{H^1}^2 and returns the
/// unpenalized residual |A h - y|.
ResidualValue residual_to_range(const ForwardMatrix& A, const BoundaryData& y, ResidualMode mode,
                                const ResidualSettings& settings = {});

/// Same for a projector that has already been factored.
double residual_to_range(const RangeProjector& P, const BoundaryData& y);

/// inf over h of |A_m h - A_{m0} h0| with h0 the slip of the map.
ResidualValue inf_residual(const PhiMap& map, const PlaneParams& m, const PlaneParams& m0,
                           ResidualMode mode, const ResidualSettings& settings = {});

struct RayPoint {
    double t = 0.0;  ///< |m - m0|
    PlaneParams m;
    double projection = 0.0;
    double regularized = 0.0;
    double lambda = 0.0;
};

/// Both residual modes along m0 + t * dir / |dir|.
std::vector<RayPoint> inf_residual_ray(const PhiMap& map, const PlaneParams& m0, const Vec3& dir,
                                       const std::vector<double>& ts,
                                       const ResidualSettings& settings = {});

struct LipschitzPair {
    PlaneParams m;
    PlaneParams m2;
    double distance = 0.0;
    double ratio = 0.0;  ///< |phi(m) - phi(m2)| / |m - m2|
    bool near_diagonal = false;
    /// sqrt(q' Gram q) / |q| at the midpoint, q = m2 - m (near-diagonal pairs only).
    std::optional<double> predicted;
};

struct LipschitzScan {
    double c_emp = 0.0;
    LipschitzPair argmin;
    std::vector<LipschitzPair> pairs;
    std::uint64_t seed = 0;
};

/// min ratio over num_pairs pairs. One tenth of the budget goes to each
/// near-diagonal distance, the rest to pairs uniform in B.
LipschitzScan lipschitz_scan(const PhiMap& map, const ParamBox& box, int num_pairs,
                             std::uint64_t seed,
                             const std::vector<double>& near_distances = {1e-2, 1e-3});

/// Forward matrices and range projectors at fixed grid nodes, factored once.
class GridBank {
public:
    GridBank(std::vector<PlaneParams> nodes, const RegionR& region, const SensorSet& sensors,
             int quad_order = kDefaultQuadOrder, double tau = kDefaultTau);

    int size() const { return static_cast<int>(nodes_.size()); }
    const PlaneParams& node(int i) const { return nodes_[i]; }
    const ForwardMatrix& matrix(int i) const { return matrices_[i]; }
    const RangeProjector& projector(int i) const { return projectors_[i]; }
    const RegionR& region() const { return region_; }

private:
    std::vector<PlaneParams> nodes_;
    RegionR region_;
    std::vector<ForwardMatrix> matrices_;
    std::vector<RangeProjector> projectors_;
};

struct SetSCheck {
    bool member = false;
    double h1_norm = 0.0;
    double min_data_norm = 0.0;  ///< min over the grid of |A_m h|
    double upper_slack = 0.0;  ///< M2 - h1_norm
    double lower_slack = 0.0;  ///< min_data_norm - M1
};

SetSCheck set_S_check(const SlipGrid& h, const GridBank& bank, double M1, double M2);

struct UniformScan {
    double c_emp = 0.0;
    int argmin_m = -1;  ///< grid index of the model plane
    int argmin_m2 = -1;  ///< grid index of the data plane
    int argmin_sample = -1;
    int pairs = 0;
};

/// min over node pairs m != m2 and samples h of inf_g |A_m g - A_m2 h| / |m - m2|.
/// Throws DomainError if samples is empty or a sample is outside S(M1, M2).
UniformScan uniform_constant_scan(const GridBank& bank, const std::vector<SlipGrid>& samples,
                                  double M1, double M2, ResidualMode mode,
                                  const ResidualSettings& settings = {});

/// Pointwise derivative of the field of slip h along q in m:
///   w(x) = int dH/dy3(x,y,n sigma) f h - int H(x,y,grad f) h,   f = q1 y1 + q2 y2 + q3,
/// minus int H(x,y,n sigma) g0 when g0 is given. Throws DomainError if x3 > 0
/// or x lies on the crack.
double directional_field_w(const PlaneParams& m, const SlipGrid& h, const Vec3& q, const Point3& x,
                           int quad_order = kDefaultQuadOrder,
                           const SlipGrid* g0 = nullptr);

}  // namespace halfcrack
