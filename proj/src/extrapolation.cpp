#include "halfcrack/extrapolation.hpp"

#include "halfcrack/errors.hpp"

namespace halfcrack {

double richardson_to_zero(const std::vector<double>& h, const std::vector<double>& f)
{
    if (h.size() != f.size() || h.size() < 2) {
        throw DomainError("extrapolation needs at least two (h, f) samples");
    }
    for (size_t k = 0; k < h.size(); ++k) {
        if (!(h[k] > 0.0) || (k > 0 && !(h[k] < h[k - 1]))) {
            throw DomainError("extrapolation: step sizes must be positive and strictly decreasing");
        }
    }
    // Neville's scheme evaluated at 0.
    std::vector<double> p = f;
    const size_t n = h.size();
    for (size_t level = 1; level < n; ++level) {
        for (size_t i = 0; i + level < n; ++i) {
            const double hi = h[i];
            const double hj = h[i + level];
            p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
        }
    }
    return p[0];
}

}  // namespace halfcrack
