#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "halfcrack/errors.hpp"
#include "halfcrack/forward.hpp"
#include "halfcrack/kernels.hpp"

using namespace halfcrack;
using boost::math::quadrature::gauss_kronrod;

namespace {

const RegionR kRegion{-1.0, 1.0, -1.0, 1.0, 7, 7};
const PlaneParams kPlane{0.2, -0.1, -1.5};

SensorSet small_sensors() { return SensorSet::grid(-2.0, 2.0, -2.0, 2.0, 5, 5); }

// int_R H(x, y(m), n sigma) hat_{ij}(y) dy by nested adaptive Gauss-Kronrod
// over the four cells of the hat support.
double entry_oracle(const PlaneParams& m, const RegionR& r, int i, int j, const Point3& x)
{
    const double h1 = r.h1();
    const double h2 = r.h2();
    const double c1 = r.node_x1(i);
    const double c2 = r.node_x2(j);
    const Vec3 ns = m.scaled_normal();
    double total = 0.0;
    for (double lo1 : {c1 - h1, c1}) {
        for (double lo2 : {c2 - h2, c2}) {
            auto inner = [&](double y1) {
                auto f = [&](double y2) {
                    const double hat = (1.0 - std::abs(y1 - c1) / h1) * (1.0 - std::abs(y2 - c2) / h2);
                    return kernel_h(x, m.point(y1, y2), ns) * hat;
                };
                return gauss_kronrod<double, 31>::integrate(f, lo2, lo2 + h2, 15, 1e-14);
            };
            total += gauss_kronrod<double, 31>::integrate(inner, lo1, lo1 + h1, 15, 1e-14);
        }
    }
    return total;
}

}  // namespace

TEST(Forward, SingleEntryAgainstAdaptiveOracle)
{
    const SensorSet s = SensorSet::grid(0.5, 1.5, -0.3, 0.3, 2, 2);
    const ForwardMatrix A = assemble_A(kPlane, kRegion, s, 12);
    // Interior node (3, 2) has dof index (2 - 1) * 5 + (3 - 1).
    const int dof = 1 * (kRegion.n1 - 2) + 2;
    for (int k = 0; k < s.size(); ++k) {
        const double ref = entry_oracle(kPlane, kRegion, 3, 2, s.point(k));
        EXPECT_NEAR(A.entries(k, dof), ref, 1e-8 * std::abs(ref)) << "sensor " << k;
    }
}

TEST(Forward, QuadratureConverges)
{
    const SensorSet s = small_sensors();
    const Eigen::MatrixXd a4 = assemble_A(kPlane, kRegion, s, 4).entries;
    const Eigen::MatrixXd a8 = assemble_A(kPlane, kRegion, s, 8).entries;
    const Eigen::MatrixXd a12 = assemble_A(kPlane, kRegion, s, 12).entries;
    const double e4 = (a4 - a12).norm();
    const double e8 = (a8 - a12).norm();
    EXPECT_LT(e8, 1e-3 * e4);
    EXPECT_LT(e4, 1e-4 * a12.norm());
}

TEST(Forward, TranslationEquivariance)
{
    // Shifting the region, the plane offset and the sensors together leaves A unchanged.
    const double s1 = 0.7;
    const double s2 = -0.4;
    const RegionR moved{kRegion.x1_min + s1, kRegion.x1_max + s1, kRegion.x2_min + s2,
                        kRegion.x2_max + s2, kRegion.n1, kRegion.n2};
    const PlaneParams m2{kPlane.a, kPlane.b, kPlane.d - kPlane.a * s1 - kPlane.b * s2};
    const Eigen::MatrixXd a = assemble_A(kPlane, kRegion, small_sensors()).entries;
    const Eigen::MatrixXd b =
        assemble_A(m2, moved, SensorSet::grid(-2.0 + s1, 2.0 + s1, -2.0 + s2, 2.0 + s2, 5, 5))
            .entries;
    EXPECT_LT((a - b).norm(), 1e-13 * a.norm());
}

TEST(Forward, ApplyMatchesFieldEvaluation)
{
    const SensorSet s = small_sensors();
    const SlipGrid g = SlipGrid::from_function(kRegion, slip_family::tent(kRegion, 1.0));
    const BoundaryData d = assemble_A(kPlane, kRegion, s).apply(g);
    for (int k : {0, 7, 12, 24}) {
        EXPECT_NEAR(d.values[k], eval_field(kPlane, g, s.point(k)), 1e-12);
    }
    EXPECT_NEAR(d.l2v_norm(), std::sqrt(d.l2v_dot(d)), 1e-15);
    EXPECT_NEAR((d - d).l2v_norm(), 0.0, 0.0);
}

TEST(Forward, SensorWeightsAreCellAreas)
{
    const SensorSet s = SensorSet::grid(-3.0, 3.0, -1.0, 1.0, 7, 5);
    for (double w : s.weights) {
        EXPECT_DOUBLE_EQ(w, 1.0 * 0.5);
    }
    SensorSet dup = s;
    dup.points[1] = dup.points[0];
    EXPECT_THROW(dup.validate(), DomainError);
    EXPECT_THROW(SensorSet{}.validate(), DomainError);
}

TEST(Forward, RejectsCrackAtSurface)
{
    EXPECT_THROW(assemble_A(PlaneParams{0.0, 0.0, 0.1}, kRegion, small_sensors()), DomainError);
    EXPECT_THROW(assemble_A(PlaneParams{1.0, 0.0, -1.0}, kRegion, small_sensors()), DomainError);
    const SlipGrid g(kRegion);
    EXPECT_THROW(eval_field(kPlane, g, Point3(0, 0, 0.5)), DomainError);
    EXPECT_THROW(eval_field(kPlane, g, kPlane.point(0.1, 0.2)), DomainError);
}

TEST(Forward, DistanceToPatch)
{
    const PlaneParams flat{0.0, 0.0, -1.0};
    EXPECT_NEAR(distance_to_patch(flat, kRegion, Point3(0.2, 0.3, 0.0)), 1.0, 1e-15);
    EXPECT_NEAR(distance_to_patch(flat, kRegion, Point3(3.0, 0.0, -1.0)), 2.0, 1e-15);
    EXPECT_NEAR(distance_to_patch(flat, kRegion, Point3(4.0, 5.0, -1.0)), 5.0, 1e-15);
    // Tilted plane: foot of the perpendicular inside the patch.
    const CrackFrame f = make_frame(kPlane);
    const Point3 x = kPlane.point(0.1, 0.2) + 0.3 * f.n;
    EXPECT_NEAR(distance_to_patch(kPlane, kRegion, x), 0.3, 1e-14);
}

TEST(Forward, AnalyticDerivativeMatchesFiniteDifference)
{
    const SensorSet s = small_sensors();
    const SlipGrid g = SlipGrid::from_function(kRegion, slip_family::tent(kRegion, 1.0));
    const auto cols = assemble_dA_dm_applied(kPlane, kRegion, s, g);
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
        Vec3 dv = Vec3::Zero();
        dv[k] = h;
        const auto plus = assemble_A(PlaneParams::from_vector(kPlane.as_vector() + dv), kRegion, s).apply(g);
        const auto minus = assemble_A(PlaneParams::from_vector(kPlane.as_vector() - dv), kRegion, s).apply(g);
        const Eigen::VectorXd fd = (plus.values - minus.values) / (2 * h);
        EXPECT_LT((fd - cols[k].values).norm(), 1e-7 * fd.norm()) << "component " << k;
    }
}

TEST(Forward, NeumannConditionOnSurface)
{
    const SlipGrid g = SlipGrid::from_function(kRegion, slip_family::tent(kRegion, 1.0));
    std::vector<Point3> top;
    for (int k = 0; k < small_sensors().size(); ++k) {
        top.push_back(small_sensors().point(k));
    }
    const NeumannCheck nc = check_neumann_top(kPlane, g, top);
    EXPECT_LE(nc.max_rel, 1e-12);
    EXPECT_THROW(check_neumann_top(kPlane, g, {Point3(0, 0, -0.1)}), DomainError);
}

TEST(Forward, FieldIsHarmonic)
{
    const SlipGrid g = SlipGrid::from_function(kRegion, slip_family::tent(kRegion, 1.0));
    const std::vector<Point3> probes{{0.5, 0.5, -0.5}, {2.0, -1.0, -1.0}, {0.0, 0.0, -3.0}};
    EXPECT_LE(check_harmonic(kPlane, g, probes, 1e-3), 1e-5);
}

TEST(Forward, JumpAcrossCrackEqualsSlip)
{
    const SlipGrid g = SlipGrid::from_function(kRegion, slip_family::tent(kRegion, 1.0));
    const JumpRecovery jr = recover_jump(kPlane, g, 0.125, -0.375, {0.04, 0.02, 0.01, 0.005});
    EXPECT_NEAR(jr.slip, g.interpolate(0.125, -0.375), 0.0);
    EXPECT_NEAR(jr.extrapolated / jr.slip, 1.0, 1e-2);
    EXPECT_THROW(recover_jump(kPlane, g, 1.0, 0.0, {0.02, 0.01}), DomainError);
}

TEST(Forward, FarFieldDecaysLikeInverseSquare)
{
    const PlaneParams m{0.5, 0.3, -2.0};
    const SlipGrid g = SlipGrid::from_function(kRegion, slip_family::tent(kRegion, 1.0));
    const double diam = std::hypot(2.0, 2.0) * make_frame(m).sigma;
    const Vec3 dir = Vec3(-m.a, -m.b, -0.3).normalized();
    const Point3 x = 8.0 * diam * dir;
    const double ratio = eval_field(m, g, 2.0 * x) / eval_field(m, g, x);
    EXPECT_GE(ratio, 0.23);
    EXPECT_LE(ratio, 0.27);
}
