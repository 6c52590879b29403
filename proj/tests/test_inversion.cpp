#include <cmath>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "halfcrack/errors.hpp"
#include "halfcrack/inversion.hpp"
#include "halfcrack/tikhonov.hpp"

using namespace halfcrack;

namespace {

InverseConfig small_config()
{
    InverseConfig cfg;
    cfg.region = RegionR{-1.0, 1.0, -1.0, 1.0, 7, 7};
    cfg.sensors = SensorSet::grid(-3.0, 3.0, -3.0, 3.0, 11, 11);
    cfg.starts = {1, 1, 2};
    return cfg;
}

const PlaneParams kTrue{0.15, -0.1, -1.6};

}  // namespace

TEST(Inversion, RefinedRegionKeepsBounds)
{
    const RegionR r = refined(RegionR{}, 2);
    EXPECT_EQ(r.n1, 17);
    EXPECT_EQ(r.n2, 17);
    EXPECT_EQ(r.x1_min, -1.0);
    EXPECT_EQ(r.x2_max, 1.0);
}

TEST(Inversion, SolveSlipIsLinearInData)
{
    const InverseConfig cfg = small_config();
    const double lambda = resolve_lambda(cfg);
    const SlipGrid g = SlipGrid::from_function(cfg.region, slip_family::tent(cfg.region, 1.0));
    const BoundaryData d = assemble_A(kTrue, cfg.region, cfg.sensors).apply(g);
    BoundaryData d3 = d;
    d3.values *= 3.0;
    const SlipGrid s1 = solve_slip(kTrue, d, lambda, cfg.region, cfg.sensors);
    const SlipGrid s3 = solve_slip(kTrue, d3, lambda, cfg.region, cfg.sensors);
    EXPECT_LT((s3.values() - 3.0 * s1.values()).norm(), 1e-10 * s3.values().norm());

    BoundaryData zero = d;
    zero.values.setZero();
    EXPECT_EQ(solve_slip(kTrue, zero, lambda, cfg.region, cfg.sensors).values().norm(), 0.0);
    EXPECT_THROW(solve_slip(kTrue, d, 0.0, cfg.region, cfg.sensors), DomainError);
    EXPECT_THROW(solve_slip(PlaneParams{0, 0, 0.2}, d, lambda, cfg.region, cfg.sensors), DomainError);
}

TEST(Inversion, TikhonovMatchesNormalEquations)
{
    const InverseConfig cfg = small_config();
    const ForwardMatrix A = assemble_A(kTrue, cfg.region, cfg.sensors);
    const double lambda = 1e-6 * std::pow(top_singular_value(A), 2);
    Eigen::VectorXd y(cfg.sensors.size());
    for (int i = 0; i < y.size(); ++i) {
        y[i] = std::cos(0.3 * i);
    }
    const Eigen::MatrixXd W = A.weights.asDiagonal();
    const Eigen::MatrixXd M = A.entries.transpose() * W * A.entries + lambda * h1_gram(cfg.region);
    const Eigen::VectorXd ref = M.ldlt().solve(A.entries.transpose() * W * y);
    const Eigen::VectorXd got = TikhonovSolver(A, lambda).solve(y);
    EXPECT_LT((got - ref).norm(), 1e-8 * ref.norm());
    EXPECT_NEAR(top_singular_value(A),
                Eigen::JacobiSVD<Eigen::MatrixXd>(A.weighted()).singularValues()[0], 1e-12);
}

TEST(Inversion, ObjectiveIsResidualOfSolvedSlip)
{
    const InverseConfig cfg = small_config();
    const double lambda = resolve_lambda(cfg);
    const BoundaryData d = synthesize_data(kTrue, cfg.region, cfg.sensors,
                                           slip_family::tent(cfg.region, 1.0), 4, {});
    const PlaneParams m{0.1, 0.0, -1.5};
    const SlipGrid g = solve_slip(m, d, lambda, cfg.region, cfg.sensors);
    const double direct = (assemble_A(m, cfg.region, cfg.sensors).apply(g) - d).l2v_norm();
    EXPECT_NEAR(objective(m, d, lambda, cfg.region, cfg.sensors), direct, 1e-12 * d.l2v_norm());
}

TEST(Inversion, RecoversPlaneFromCrimeFreeData)
{
    const InverseConfig cfg = small_config();
    const BoundaryData d = synthesize_data(kTrue, cfg.region, cfg.sensors,
                                           slip_family::tent(cfg.region, 1.0), 4, {});
    const InverseResult r = reconstruct(d, cfg);
    EXPECT_TRUE(r.converged);
    EXPECT_FALSE(r.on_boundary);
    EXPECT_LT((r.m_star.as_vector() - kTrue.as_vector()).norm(), 1e-3);
    EXPECT_EQ(r.trace.size(), 2u);
    // Reported residual is recomputed exactly from the returned pair.
    const double direct =
        (assemble_A(r.m_star, cfg.region, cfg.sensors).apply(r.g_star) - d).l2v_norm();
    EXPECT_NEAR(r.residual, direct, 1e-10 * d.l2v_norm());
    EXPECT_NEAR(r.lambda, resolve_lambda(cfg), 0.0);
}

TEST(Inversion, PlaneOutsideBoxEndsOnBoundary)
{
    const InverseConfig cfg = small_config();
    const PlaneParams outside{0.15, -0.1, -2.4};
    const BoundaryData d = synthesize_data(outside, cfg.region, cfg.sensors,
                                           slip_family::tent(cfg.region, 1.0), 4, {});
    const InverseResult r = reconstruct(d, cfg);
    EXPECT_TRUE(r.on_boundary);
    EXPECT_FALSE(r.converged);
    EXPECT_NEAR(r.m_star.d, cfg.box.lo.d, 1e-12);
}

TEST(Inversion, NoiseIsSeededAndRelative)
{
    const InverseConfig cfg = small_config();
    const auto tent = slip_family::tent(cfg.region, 1.0);
    const BoundaryData clean = synthesize_data(kTrue, cfg.region, cfg.sensors, tent, 4, {});
    SyntheticData o;
    o.noise_rel = 0.01;
    o.seed = 5;
    const BoundaryData n1 = synthesize_data(kTrue, cfg.region, cfg.sensors, tent, 4, o);
    const BoundaryData n2 = synthesize_data(kTrue, cfg.region, cfg.sensors, tent, 4, o);
    EXPECT_EQ(n1.values, n2.values);
    const double rms = clean.values.norm() / std::sqrt(clean.values.size());
    const double noise_rms = (n1.values - clean.values).norm() / std::sqrt(clean.values.size());
    EXPECT_NEAR(noise_rms / rms, 0.01, 0.003);
}

TEST(Inversion, ConfigValidation)
{
    InverseConfig cfg = small_config();
    EXPECT_NO_THROW(cfg.validate());
    cfg.lambda_rel = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = small_config();
    cfg.starts = {0, 1, 1};
    EXPECT_THROW(cfg.validate(), DomainError);
}
