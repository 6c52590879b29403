#include <cmath>

#include <gtest/gtest.h>

#include "halfcrack/errors.hpp"
#include "halfcrack/jumps.hpp"
#include "halfcrack/quadrature.hpp"

using namespace halfcrack;

TEST(Jumps, KindNamesAndIndices)
{
    EXPECT_EQ(to_string(JumpKind::J342), "J342");
    for (int k = 0; k < 8; ++k) {
        EXPECT_EQ(kind_index(kAllJumpKinds[k]), k);
    }
}

TEST(Jumps, PlaneFrame)
{
    const PlaneParams m{0.5, -0.3, -3.0};
    const PlaneFrame f = plane_frame(m);
    EXPECT_NEAR(f.origin[2], -3.0, 1e-15);
    EXPECT_NEAR(f.t.dot(f.s), 0.0, 1e-15);
    EXPECT_NEAR(f.t.dot(f.n), 0.0, 1e-15);
    EXPECT_NEAR(f.s.dot(f.n), 0.0, 1e-15);
    EXPECT_NEAR(f.n.norm(), 1.0, 1e-15);
    // Points built from the frame stay on the plane.
    const Point3 p = f.at(0.7, -1.1);
    EXPECT_NEAR(p[2], m.height(p[0], p[1]), 1e-14);
    EXPECT_EQ(plane_frame(PlaneParams{0, 0, -2}).t, Vec3::UnitX());
}

TEST(Jumps, BumpDerivatives)
{
    const Bump b{0.3, 0.2, 0.8, 1.5};
    const double h = 1e-4;
    const double x = 0.5;
    const double y = -0.1;
    const auto g = b.gradient(x, y);
    EXPECT_NEAR(g[0], (b.value(x + h, y) - b.value(x - h, y)) / (2 * h), 1e-7);
    EXPECT_NEAR(g[1], (b.value(x, y + h) - b.value(x, y - h)) / (2 * h), 1e-7);
    const double lap = (b.value(x + h, y) + b.value(x - h, y) + b.value(x, y + h) +
                        b.value(x, y - h) - 4 * b.value(x, y)) /
                       (h * h);
    EXPECT_NEAR(b.laplacian(x, y), lap, 1e-5);
    EXPECT_EQ(b.value(1.2, 0.2), 0.0);
    const auto box = b.support_box();
    EXPECT_DOUBLE_EQ(box[0], -0.5);
    EXPECT_DOUBLE_EQ(box[3], 1.0);
}

TEST(Jumps, ReferenceRightHandSides)
{
    // Independent tensor rule on the phi support.
    const TestPair p = default_test_pair();
    const auto box = p.phi.support_box();
    const MappedRule r1 = composite_gauss(box[0], box[1], 96, 8);
    const MappedRule r2 = composite_gauss(box[2], box[3], 96, 8);
    double gphi = 0.0;
    double gdt = 0.0;
    double glap = 0.0;
    for (size_t i = 0; i < r1.x.size(); ++i) {
        for (size_t j = 0; j < r2.x.size(); ++j) {
            const double w = r1.w[i] * r2.w[j];
            const double g = p.g.value(r1.x[i], r2.x[j]);
            gphi += w * g * p.phi.value(r1.x[i], r2.x[j]);
            gdt += w * g * p.phi.gradient(r1.x[i], r2.x[j])[0];
            glap += w * g * p.phi.laplacian(r1.x[i], r2.x[j]);
        }
    }
    EXPECT_NEAR(rhs_reference(JumpKind::J31, p), gphi, 1e-9 * std::abs(gphi));
    EXPECT_NEAR(rhs_reference(JumpKind::J32, p), gdt, 1e-9 * std::abs(gdt));
    EXPECT_NEAR(rhs_reference(JumpKind::J35, p), -gdt, 1e-9 * std::abs(gdt));
    EXPECT_NEAR(rhs_reference(JumpKind::J36, p), glap, 1e-9 * std::abs(glap));
    for (JumpKind k : {JumpKind::J33, JumpKind::J34, JumpKind::J342, JumpKind::J343}) {
        EXPECT_EQ(rhs_reference(k, p), 0.0);
    }
    EXPECT_GT(pairing_scale(p), gphi - 1e-12);
    EXPECT_GT(std::abs(gdt), 1e-2);
}

TEST(Jumps, LhsShrinksTowardsReferenceOnHorizontalPlane)
{
    const PlaneParams m{0.0, 0.0, -2.0};
    const TestPair p = default_test_pair();
    const auto l1 = lhs_eps_all(m, p, 0.04);
    const auto l2 = lhs_eps_all(m, p, 0.02);
    const double rhs = rhs_reference(JumpKind::J31, p);
    EXPECT_LT(std::abs(l2[0] - rhs), std::abs(l1[0] - rhs) / 1.5);
    EXPECT_DOUBLE_EQ(lhs_eps(JumpKind::J31, m, p, 0.04), l1[0]);
}

TEST(Jumps, VerifyAllKindsOnTiltedPlane)
{
    const auto reports =
        verify_all_jumps(PlaneParams{0.5, -0.3, -3.0}, default_test_pair(), {0.08, 0.04, 0.02, 0.01});
    for (const JumpReport& r : reports) {
        EXPECT_LE(r.rel_err, 1e-2) << to_string(r.kind);
        EXPECT_TRUE(r.first_order) << to_string(r.kind);
        EXPECT_EQ(r.lhs.size(), 4u);
    }
}

TEST(Jumps, RejectsBadEpsSequences)
{
    const PlaneParams m{0.0, 0.0, -2.0};
    const TestPair p = default_test_pair();
    EXPECT_THROW(verify_jump(JumpKind::J31, m, p, {0.04, 0.02}), DomainError);
    EXPECT_THROW(verify_jump(JumpKind::J31, m, p, {0.01, 0.02, 0.04}), DomainError);
    EXPECT_THROW(verify_jump(JumpKind::J31, m, p, {0.08, 0.04, 0.01}), DomainError);
    EXPECT_THROW(lhs_eps_all(m, p, 1e-7), DomainError);
}
