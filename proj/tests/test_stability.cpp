#include <cmath>

#include <gtest/gtest.h>

#include "halfcrack/errors.hpp"
#include "halfcrack/stability.hpp"

using namespace halfcrack;

namespace {

const RegionR kRegion{-1.0, 1.0, -1.0, 1.0, 7, 7};
const PlaneParams kPlane{0.1, -0.05, -1.6};

SlipGrid bump_slip(double amp = 1.0)
{
    return SlipGrid::from_function(kRegion, slip_family::bump(0.0, 0.0, 0.9, amp));
}

SensorSet sensors() { return SensorSet::grid(-3.0, 3.0, -3.0, 3.0, 9, 9); }

}  // namespace

TEST(Stability, PhiMapCachesMatrices)
{
    const PhiMap map(bump_slip(), sensors());
    const auto a = map.matrix(kPlane);
    EXPECT_EQ(a.get(), map.matrix(kPlane).get());
    EXPECT_EQ(map(kPlane).values, a->apply(map.slip()).values);
    EXPECT_THROW(map.matrix(PlaneParams{0, 0, 0.5}), DomainError);
}

TEST(Stability, JacobianAgainstCentralDifferences)
{
    const PhiMap map(bump_slip(), sensors());
    const PhiJacobian jac = phi_jacobian(map, kPlane);
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
        Vec3 dv = Vec3::Zero();
        dv[k] = h;
        const auto p = phi(map, PlaneParams::from_vector(kPlane.as_vector() + dv));
        const auto m = phi(map, PlaneParams::from_vector(kPlane.as_vector() - dv));
        const Eigen::VectorXd fd = (p.values - m.values) / (2 * h);
        EXPECT_LT((fd - jac.columns[k].values).norm(), 1e-6 * fd.norm());
    }
    const Vec3 q(0.3, -1.0, 2.0);
    const BoundaryData dq = jac.directional(q);
    EXPECT_NEAR(dq.l2v_norm() * dq.l2v_norm(), q.dot(jac.gram() * q), 1e-12 * q.squaredNorm());
}

TEST(Stability, GramScalesQuadraticallyWithSlip)
{
    const PhiJacobian j1 = phi_jacobian(PhiMap(bump_slip(1.0), sensors()), kPlane);
    const PhiJacobian j2 = phi_jacobian(PhiMap(bump_slip(2.0), sensors()), kPlane);
    EXPECT_NEAR(gram_min_eig(j2), 4.0 * gram_min_eig(j1), 1e-10 * gram_min_eig(j2));
    EXPECT_GT(gram_min_eig(j1), 0.0);
    const PhiJacobian j0 = phi_jacobian(PhiMap(SlipGrid(kRegion), sensors()), kPlane);
    EXPECT_EQ(gram_min_eig(j0), 0.0);
}

TEST(Stability, ProjectorIsOrthogonal)
{
    const ForwardMatrix A = assemble_A(kPlane, kRegion, sensors());
    const RangeProjector P = range_projector(A);
    EXPECT_GT(P.rank(), 0);
    EXPECT_LE(P.rank(), kRegion.num_dofs());
    const Eigen::MatrixXd id = P.basis.transpose() * P.basis;
    EXPECT_LT((id - Eigen::MatrixXd::Identity(P.rank(), P.rank())).norm(), 1e-12);

    Eigen::VectorXd v(sensors().size());
    for (int i = 0; i < v.size(); ++i) {
        v[i] = std::sin(1.7 * i) + 0.1 * i;
    }
    const BoundaryData y{v, A.weights};
    const BoundaryData py = P.apply(y);
    EXPECT_LT((P.apply(py).values - py.values).norm(), 1e-12 * py.values.norm());
    // (I - P) y is orthogonal to P y in the weighted inner product.
    EXPECT_NEAR(P.complement(y).l2v_dot(py), 0.0, 1e-12 * y.l2v_norm() * y.l2v_norm());
    // Self-adjointness: <P y, z> = <y, P z>.
    const BoundaryData z{v.reverse(), A.weights};
    EXPECT_NEAR(py.l2v_dot(z), y.l2v_dot(P.apply(z)), 1e-12 * y.l2v_norm() * z.l2v_norm());

    EXPECT_THROW(range_projector(A, 0.0), DomainError);
    EXPECT_THROW(range_projector(A, 1.5), DomainError);
}

TEST(Stability, ResidualVanishesOnTheRange)
{
    const ForwardMatrix A = assemble_A(kPlane, kRegion, sensors());
    const BoundaryData y = A.apply(bump_slip());
    const double scale = y.l2v_norm();
    EXPECT_LT(residual_to_range(A, y, ResidualMode::Projection).value, 1e-12 * scale);
    const ResidualValue reg = residual_to_range(A, y, ResidualMode::Regularized);
    EXPECT_LT(reg.value, 1e-4 * scale);
    EXPECT_GT(reg.lambda, 0.0);
    EXPECT_EQ(residual_to_range(range_projector(A), y),
              residual_to_range(A, y, ResidualMode::Projection).value);

    const PhiMap map(bump_slip(), sensors());
    EXPECT_LT(inf_residual(map, kPlane, kPlane, ResidualMode::Projection).value, 1e-12 * scale);
}

TEST(Stability, RayResidualGrowsAwayFromTruePlane)
{
    const PhiMap map(bump_slip(), sensors());
    const auto ray = inf_residual_ray(map, kPlane, Vec3(1.0, 1.0, 1.0), {0.02, 0.05, 0.1});
    ASSERT_EQ(ray.size(), 3u);
    for (size_t k = 0; k < ray.size(); ++k) {
        EXPECT_GT(ray[k].projection, 0.0);
        EXPECT_NEAR((ray[k].m.as_vector() - kPlane.as_vector()).norm(), ray[k].t, 1e-14);
        if (k > 0) {
            EXPECT_GT(ray[k].projection, ray[k - 1].projection);
        }
    }
}

TEST(Stability, LipschitzScanNearDiagonalMatchesGram)
{
    const PhiMap map(bump_slip(), sensors());
    const ParamBox box;
    const LipschitzScan scan = lipschitz_scan(map, box, 40, 7);
    EXPECT_EQ(scan.pairs.size(), 40u);
    EXPECT_GT(scan.c_emp, 0.0);
    int near = 0;
    for (const LipschitzPair& p : scan.pairs) {
        EXPECT_TRUE(box.contains(p.m));
        EXPECT_TRUE(box.contains(p.m2));
        EXPECT_GE(p.ratio, scan.c_emp);
        if (p.near_diagonal) {
            ++near;
            ASSERT_TRUE(p.predicted.has_value());
            EXPECT_NEAR(p.ratio / *p.predicted, 1.0, 0.05);
        }
    }
    EXPECT_EQ(near, 8);
    // Same seed, same pairs.
    const LipschitzScan again = lipschitz_scan(map, box, 40, 7);
    EXPECT_EQ(again.c_emp, scan.c_emp);
}

TEST(Stability, DirectionalFieldMatchesFiniteDifference)
{
    const SlipGrid h = bump_slip();
    const Vec3 q(0.4, -0.2, 0.5);
    const double step = 1e-5;
    const PlaneParams mp = PlaneParams::from_vector(kPlane.as_vector() + step * q);
    const PlaneParams mm = PlaneParams::from_vector(kPlane.as_vector() - step * q);
    for (const Point3& x : {Point3(0.5, 0.5, 0.0), Point3(1.5, -0.5, -0.8), Point3(0.0, 0.0, -3.0)}) {
        const double fd = (eval_field(mp, h, x) - eval_field(mm, h, x)) / (2 * step);
        const double w = directional_field_w(kPlane, h, q, x);
        EXPECT_NEAR(w, fd, 1e-5 * std::abs(fd)) << x.transpose();
    }
    // Neumann condition carries over to w.
    const double d = 1e-4;
    const Point3 top(0.3, 0.2, 0.0);
    const double dw = (directional_field_w(kPlane, h, q, top) -
                       directional_field_w(kPlane, h, q, top - Vec3(0, 0, d))) / d;
    EXPECT_LT(std::abs(dw), 1e-3 * std::abs(directional_field_w(kPlane, h, q, top)));
    EXPECT_THROW(directional_field_w(kPlane, h, q, Point3(0, 0, 1)), DomainError);
}

TEST(Stability, UniformScanAndSetS)
{
    const ParamBox box;
    const GridBank bank(box.grid(2, 1, 2), kRegion, sensors());
    EXPECT_EQ(bank.size(), 4);
    const SlipGrid h = bump_slip();
    const SetSCheck s = set_S_check(h, bank, 1e-3, 10.0);
    EXPECT_TRUE(s.member);
    EXPECT_NEAR(s.upper_slack, 10.0 - h.h1_norm(), 1e-14);
    EXPECT_FALSE(set_S_check(h, bank, 1e-3, 0.1).member);

    const UniformScan u = uniform_constant_scan(bank, {h}, 1e-3, 10.0, ResidualMode::Projection);
    EXPECT_EQ(u.pairs, 12);
    EXPECT_GT(u.c_emp, 0.0);
    EXPECT_NE(u.argmin_m, u.argmin_m2);
    EXPECT_THROW(uniform_constant_scan(bank, {}, 1e-3, 10.0, ResidualMode::Projection), DomainError);
    EXPECT_THROW(uniform_constant_scan(bank, {h}, 1e-3, 0.1, ResidualMode::Projection), DomainError);
}
