#pragma once

#include <vector>

namespace halfcrack {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order() const { return static_cast<int>(nodes.size()); }
};

inline constexpr int kMaxGaussOrder = 64;

/// Cached rule of the given order (1..kMaxGaussOrder). Thread-safe.
const GaussRule& gauss_legendre(int order);

/// Rule mapped to [lo, hi].
struct MappedRule {
    std::vector<double> x;
    std::vector<double> w;
};
MappedRule gauss_on(double lo, double hi, int order);

/// Composite rule: [lo, hi] split into `panels` equal panels of `order` points.
MappedRule composite_gauss(double lo, double hi, int panels, int order);

}  // namespace halfcrack
