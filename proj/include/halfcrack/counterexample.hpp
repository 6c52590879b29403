#pragma once

// Two different graph cracks over the disk of radius 2 carrying the same slip
// whose fields agree on the surface x3 = 0. The flat annulus is shared, so the
// difference of the fields is the double layer of a constant density on the
// closed boundary of the lens D between the two caps: -3 inside D, 0 outside.

#include <vector>

#include "halfcrack/forward.hpp"
#include "halfcrack/geometry.hpp"

namespace halfcrack {

struct CounterexampleSetup {
    int cap_nodes_r = 24;  ///< Gauss nodes in r on [0, 1)
    int annulus_nodes_r = 24;  ///< Gauss nodes in r on [1, 2)
    int nodes_theta = 128;  ///< midpoint nodes in theta

    /// 3 for r < 1, 4 - r^2 for 1 <= r < 2, 0 beyond.
    static double slip(double x1, double x2);
    /// True when x lies in the open lens between the two caps.
    static bool inside_lens(const Point3& x);

    /// Throws DomainError on non-positive node counts.
    void validate() const;
    /// Every node count multiplied by `factor`.
    CounterexampleSetup refined(int factor) const;
};

/// Field u^i(x) of crack `which` with the shared slip. Throws DomainError when
/// x3 > 0 or x lies on the graph.
double eval_counterexample_field(CapKind which, const Point3& x,
                                 const CounterexampleSetup& setup = {});

/// d u^i / d x3 at x. Vanishes on x3 = 0 by construction of the kernel.
double eval_counterexample_dx3(CapKind which, const Point3& x,
                               const CounterexampleSetup& setup = {});

struct Indistinguishability {
    double max_diff = 0.0;  ///< max |u^1 - u^2| over the sensors
    double max_dx3_diff = 0.0;  ///< max |d_x3 u^1 - d_x3 u^2|
    double scale = 0.0;  ///< max |u^1|
    double rel_diff() const { return scale > 0.0 ? max_diff / scale : max_diff; }
    double rel_dx3_diff() const { return scale > 0.0 ? max_dx3_diff / scale : max_dx3_diff; }
};

/// Compares both fields on surface sensors. Throws DomainError if the set is empty.
Indistinguishability verify_indistinguishable(const SensorSet& sensors,
                                              const CounterexampleSetup& setup = {});

}  // namespace halfcrack
