#pragma once

#include <vector>

namespace halfcrack {

/// Polynomial (Neville) extrapolation to h = 0 of samples f(h_k). With
/// values of the form f(h) = f0 + c1 h + c2 h^2 + ... this is the repeated
/// Richardson table. Throws DomainError when fewer than two samples are given
/// or the h_k are not strictly decreasing and positive.
double richardson_to_zero(const std::vector<double>& h, const std::vector<double>& f);

}  // namespace halfcrack
