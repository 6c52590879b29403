#pragma once

#include <Eigen/Core>
#include <Eigen/QR>

#include "halfcrack/forward.hpp"

namespace halfcrack {

/// Minimizer of |A g - y|^2_{L^2(V)} + lambda g' K g with K the H^1 gram of the
/// region. Solved as the stacked least-squares system
///   [W^{1/2} A; sqrt(lambda) L'] g = [W^{1/2} y; 0],   K = L L',
/// whose minimizer is that of the normal equations A' W A + lambda K.
class TikhonovSolver {
public:
    /// Throws DomainError unless lambda > 0.
    TikhonovSolver(const ForwardMatrix& A, double lambda);

    double lambda() const { return lambda_; }

    /// Interior dof values of the minimizer for data values y.
    Eigen::VectorXd solve(const Eigen::VectorXd& y) const;
    /// M^{-1} (W^{1/2} A)' C for a block C given in the W^{1/2}-scaled space,
    /// with M = A' W A + lambda K.
    Eigen::MatrixXd solve_scaled(const Eigen::MatrixXd& c) const;

private:
    Eigen::MatrixXd stacked_;
    Eigen::VectorXd sqrt_w_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    double lambda_;
};

/// Largest singular value of W^{1/2} A.
double top_singular_value(const ForwardMatrix& A);

}  // namespace halfcrack
