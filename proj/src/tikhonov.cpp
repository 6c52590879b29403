#include "halfcrack/tikhonov.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "halfcrack/errors.hpp"
#include "halfcrack/slip_grid.hpp"

namespace halfcrack {

TikhonovSolver::TikhonovSolver(const ForwardMatrix& A, double lambda) : lambda_(lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("regularized slip solve: lambda must be positive and finite");
    }
    const Eigen::LLT<Eigen::MatrixXd> chol(h1_gram(A.region));
    if (chol.info() != Eigen::Success) {
        throw NumericalError("H1 gram is not positive definite");
    }
    const Eigen::MatrixXd wa = A.weighted();
    const Eigen::Index ns = wa.rows();
    const Eigen::Index nd = wa.cols();
    stacked_.resize(ns + nd, nd);
    stacked_.topRows(ns) = wa;
    stacked_.bottomRows(nd) = std::sqrt(lambda) * Eigen::MatrixXd(chol.matrixU());
    sqrt_w_ = A.weights.array().sqrt().matrix();
    qr_.compute(stacked_);
    if (qr_.rank() < nd) {
        throw NumericalError("regularized slip solve is numerically singular; lambda is below the rounding floor");
    }
}

Eigen::VectorXd TikhonovSolver::solve(const Eigen::VectorXd& y) const
{
    return solve_scaled(sqrt_w_.cwiseProduct(y));
}

Eigen::MatrixXd TikhonovSolver::solve_scaled(const Eigen::MatrixXd& c) const
{
    const Eigen::Index ns = sqrt_w_.size();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(stacked_.rows(), c.cols());
    rhs.topRows(ns) = c;
    return qr_.solve(rhs);
}

double top_singular_value(const ForwardMatrix& A)
{
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.weighted());
    return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

}  // namespace halfcrack
