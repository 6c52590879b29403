#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "halfcrack/errors.hpp"
#include "halfcrack/geometry.hpp"

using namespace halfcrack;

TEST(Geometry, DepthMarginByCornerEnumeration)
{
    // Highest corner of a*x1 + b*x2 + d over [-1,1]^2 is (1,-1): 0.2 + 0.1 - 1.5.
    const PlaneParams m{0.2, -0.1, -1.5};
    EXPECT_NEAR(crack_depth_margin(m, RegionR{}), 1.2, 1e-15);
    EXPECT_NEAR(crack_depth_margin(PlaneParams{0.0, 0.0, -0.7}, RegionR{}), 0.7, 1e-15);
    EXPECT_LT(crack_depth_margin(PlaneParams{1.0, 0.0, -0.5}, RegionR{}), 0.0);
}

TEST(Geometry, FrameIsOrthonormal)
{
    for (const PlaneParams& m : {PlaneParams{0.3, -0.2, -1.0}, PlaneParams{-0.5, 0.4, -2.0}}) {
        const CrackFrame f = make_frame(m);
        ASSERT_TRUE(f.t.has_value());
        EXPECT_NEAR(f.n.norm(), 1.0, 1e-15);
        EXPECT_NEAR(f.t->norm(), 1.0, 1e-15);
        EXPECT_NEAR(f.n.dot(*f.t), 0.0, 1e-15);
        EXPECT_NEAR(f.sigma, std::sqrt(1.0 + m.a * m.a + m.b * m.b), 1e-15);
        // n points upward and e3 = alpha n + beta t.
        EXPECT_GT(f.n[2], 0.0);
        const Vec3 e3 = f.alpha * f.n + f.beta_t * *f.t;
        EXPECT_NEAR((e3 - Vec3::UnitZ()).norm(), 0.0, 1e-14);
        // The normal is orthogonal to in-plane displacements.
        EXPECT_NEAR(f.n.dot(m.point(1.0, 0.0) - m.point(0.0, 0.0)), 0.0, 1e-15);
    }
    const CrackFrame flat = make_frame(PlaneParams{0.0, 0.0, -1.0});
    EXPECT_FALSE(flat.t.has_value());
    EXPECT_EQ(flat.n, Vec3::UnitZ());
}

TEST(Geometry, RegionValidation)
{
    EXPECT_NO_THROW(RegionR{}.validate());
    EXPECT_THROW((RegionR{1.0, -1.0, -1.0, 1.0, 5, 5}.validate()), DomainError);
    EXPECT_THROW((RegionR{-1.0, 1.0, -1.0, 1.0, 2, 5}.validate()), DomainError);
}

TEST(Geometry, GridNodesNumberInteriorDofs)
{
    const RegionR r{-1.0, 1.0, 0.0, 2.0, 5, 4};
    const auto nodes = grid_nodes(r);
    ASSERT_EQ(static_cast<int>(nodes.size()), 20);
    std::set<int> dofs;
    for (const auto& n : nodes) {
        const bool edge = n.x1 == r.x1_min || n.x1 == r.x1_max || n.x2 == r.x2_min ||
                          n.x2 == r.x2_max;
        EXPECT_EQ(n.boundary, edge);
        if (!n.boundary) {
            dofs.insert(n.dof);
        } else {
            EXPECT_EQ(n.dof, -1);
        }
    }
    EXPECT_EQ(static_cast<int>(dofs.size()), r.num_dofs());
    EXPECT_EQ(*dofs.begin(), 0);
    EXPECT_EQ(*dofs.rbegin(), r.num_dofs() - 1);
    // x1 runs fastest.
    EXPECT_DOUBLE_EQ(nodes[1].x1, -0.5);
    EXPECT_DOUBLE_EQ(nodes[1].x2, 0.0);
}

TEST(Geometry, ParamBoxOperations)
{
    const ParamBox box;
    EXPECT_NO_THROW(box.validate(RegionR{}));
    EXPECT_TRUE(box.contains(box.center()));
    EXPECT_FALSE(box.contains(PlaneParams{0.4, 0.0, -1.5}));
    const PlaneParams c = box.clamp(PlaneParams{0.4, -0.5, -1.0});
    EXPECT_EQ(c, (PlaneParams{0.3, -0.3, -1.2}));
    EXPECT_TRUE(box.on_boundary(c));
    EXPECT_FALSE(box.on_boundary(box.center()));

    const auto g = box.grid(5, 5, 5);
    EXPECT_EQ(g.size(), 125u);
    EXPECT_EQ(g.front(), box.lo);
    EXPECT_EQ(g.back(), box.hi);
    for (const auto& m : box.cell_centers(2, 2, 2)) {
        EXPECT_TRUE(box.contains(m));
        EXPECT_FALSE(box.on_boundary(m));
    }
    EXPECT_EQ(box.grid(1, 1, 1).front(), box.center());
    EXPECT_THROW(box.grid(0, 1, 1), DomainError);

    // Vertex (0.3, 0.3, -1.2) lifts the corner (1,1) to depth 0.6 only.
    ParamBox deep = box;
    deep.beta_dist = 0.7;
    EXPECT_THROW(deep.validate(RegionR{}), DomainError);
    ParamBox inverted = box;
    inverted.lo.a = 0.5;
    EXPECT_THROW(inverted.validate(RegionR{}), DomainError);
}

TEST(Geometry, GraphCracksShareTheAnnulus)
{
    const CrackGraph low(CapKind::Low);
    const CrackGraph high(CapKind::High);
    EXPECT_NEAR(low.height(0.0, 0.0), -3.0 + std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(high.height(0.0, 0.0), -1.0 - std::sqrt(2.0), 1e-15);
    for (double r : {1.0, 1.3, 1.99}) {
        EXPECT_DOUBLE_EQ(low.height(r, 0.0), -2.0);
        EXPECT_DOUBLE_EQ(high.height(0.0, r), -2.0);
    }
    // Caps meet the annulus continuously at r = 1.
    EXPECT_NEAR(low.height(0.999999, 0.0), -2.0, 1e-5);
    EXPECT_NEAR(high.height(0.999999, 0.0), -2.0, 1e-5);

    // Gradient against central differences.
    const double h = 1e-6;
    for (const CrackGraph* g : {&low, &high}) {
        const auto grad = g->gradient(0.3, -0.4);
        EXPECT_NEAR(grad[0], (g->height(0.3 + h, -0.4) - g->height(0.3 - h, -0.4)) / (2 * h),
                    1e-8);
        EXPECT_NEAR(grad[1], (g->height(0.3, -0.4 + h) - g->height(0.3, -0.4 - h)) / (2 * h),
                    1e-8);
        const GraphPoint p = g->point(0.3, -0.4);
        EXPECT_NEAR(p.normal.norm(), 1.0, 1e-14);
        EXPECT_NEAR(p.sigma, std::sqrt(1.0 + grad[0] * grad[0] + grad[1] * grad[1]), 1e-14);
    }
    EXPECT_THROW(low.point(2.5, 0.0), DomainError);
}
