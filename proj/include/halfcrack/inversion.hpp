#pragma once

// Plane and slip recovery from surface data by variable projection: for each
// trial plane the slip is the regularized least-squares fit, leaving a
// three-parameter problem in m solved by damped Gauss-Newton inside the box.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "halfcrack/forward.hpp"
#include "halfcrack/geometry.hpp"
#include "halfcrack/slip_grid.hpp"

namespace halfcrack {

struct InverseConfig {
    ParamBox box;
    RegionR region;
    SensorSet sensors;
    int quad_order = kDefaultQuadOrder;
    /// H^1 penalty relative to sigma_1^2 of W^{1/2} A at the box center; the
    /// absolute value is fixed once per reconstruction.
    double lambda_rel = 1e-10;
    std::array<int, 3> starts{2, 2, 2};  ///< multistart cells per axis of B
    int max_iter = 60;
    double tol = 1e-10;  ///< on |delta m|

    /// Throws DomainError on a non-positive lambda, tol, iteration or start count.
    void validate() const;
};

struct StartTrace {
    PlaneParams start;
    PlaneParams m;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct InverseResult {
    PlaneParams m_star;
    SlipGrid g_star;
    double residual = 0.0;  ///< |A_{m*} g* - data|_{L^2(V)}
    double lambda = 0.0;  ///< absolute penalty weight used
    int iterations = 0;
    bool converged = false;
    bool on_boundary = false;  ///< m* lies on a face of B
    std::vector<StartTrace> trace;
};

/// Regularized slip for plane m. Throws DomainError on an inadmissible plane
/// or a non-positive lambda, NumericalError if the system is singular.
SlipGrid solve_slip(const PlaneParams& m, const BoundaryData& data, double lambda,
                    const RegionR& region, const SensorSet& sensors,
                    int quad_order = kDefaultQuadOrder);

/// Data misfit |A_m g - data| at the solve_slip minimizer (penalty excluded).
double objective(const PlaneParams& m, const BoundaryData& data, double lambda,
                 const RegionR& region, const SensorSet& sensors,
                 int quad_order = kDefaultQuadOrder);

/// Absolute penalty weight lambda_rel * sigma_1^2 at the center of the box.
double resolve_lambda(const InverseConfig& cfg);

/// Multistart variable-projection Gauss-Newton. The best start is the one
/// with the smallest misfit; near-ties (1e-12 relative) go to the smallest
/// |m*|, then lexicographically smallest (a, b, d).
InverseResult reconstruct(const BoundaryData& data, const InverseConfig& cfg);

/// Options for synthetic data that avoid evaluating with the inversion operator.
struct SyntheticData {
    int refine = 2;  ///< slip grid refinement factor
    int extra_order = 2;  ///< added to the quadrature order
    double noise_rel = 0.0;  ///< Gaussian noise, relative to the RMS of the clean data
    std::uint64_t seed = 0;
};

/// A_m g evaluated on a refined slip grid with a higher quadrature order, plus
/// optional noise. `slip` is sampled at the refined nodes.
BoundaryData synthesize_data(const PlaneParams& m, const RegionR& region, const SensorSet& sensors,
                             const std::function<double(double, double)>& slip,
                             int quad_order, const SyntheticData& opts);

/// RegionR with the same bounds and (n - 1) * factor + 1 nodes per axis.
RegionR refined(const RegionR& region, int factor);

}  // namespace halfcrack
