#include "halfcrack/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "halfcrack/errors.hpp"
#include "halfcrack/kernels.hpp"
#include "halfcrack/tikhonov.hpp"

namespace halfcrack {

PhiMap::PhiMap(SlipGrid h, SensorSet sensors, int quad_order, std::size_t cache_limit)
    : h_(std::move(h)), sensors_(std::move(sensors)), quad_order_(quad_order),
      cache_limit_(std::max<std::size_t>(cache_limit, 1))
{
    sensors_.validate();
}

std::shared_ptr<const ForwardMatrix> PhiMap::matrix(const PlaneParams& m) const
{
    const std::array<double, 3> key{m.a, m.b, m.d};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
        return it->second;
    }
    if (cache_.size() >= cache_limit_) {
        cache_.clear();
    }
    auto A = std::make_shared<const ForwardMatrix>(assemble_A(m, region(), sensors_, quad_order_));
    cache_.emplace(key, A);
    return A;
}

BoundaryData PhiMap::operator()(const PlaneParams& m) const
{
    return matrix(m)->apply(h_);
}

BoundaryData phi(const PhiMap& map, const PlaneParams& m)
{
    return map(m);
}

Eigen::Matrix3d PhiJacobian::gram() const
{
    Eigen::Matrix3d g;
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            g(i, j) = columns[i].l2v_dot(columns[j]);
            g(j, i) = g(i, j);
        }
    }
    return g;
}

BoundaryData PhiJacobian::directional(const Vec3& q) const
{
    return {q[0] * columns[0].values + q[1] * columns[1].values + q[2] * columns[2].values,
            columns[0].weights};
}

PhiJacobian phi_jacobian(const PhiMap& map, const PlaneParams& m)
{
    return {m, assemble_dA_dm_applied(m, map.region(), map.sensors(), map.slip(), map.quad_order())};
}

double gram_min_eig(const PhiJacobian& jac)
{
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(jac.gram(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

Eigen::VectorXd relative_singular_values(const ForwardMatrix& A)
{
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.weighted());
    const Eigen::VectorXd s = svd.singularValues();
    if (s.size() == 0 || !(s[0] > 0.0)) {
        return Eigen::VectorXd::Zero(s.size());
    }
    return s / s[0];
}

BoundaryData RangeProjector::apply(const BoundaryData& y) const
{
    const Eigen::VectorXd z = sqrt_weights.cwiseProduct(y.values);
    const Eigen::VectorXd pz = basis * (basis.transpose() * z);
    return {pz.cwiseQuotient(sqrt_weights), y.weights};
}

BoundaryData RangeProjector::complement(const BoundaryData& y) const
{
    return y - apply(y);
}

RangeProjector range_projector(const ForwardMatrix& A, double tau)
{
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError("range projector: tau must lie in (0, 1)");
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.weighted(), Eigen::ComputeThinU);
    const Eigen::VectorXd s = svd.singularValues();
    int rank = 0;
    if (s.size() > 0 && s[0] > 0.0) {
        while (rank < s.size() && s[rank] >= tau * s[0]) {
            ++rank;
        }
    }
    if (rank == 0) {
        throw NumericalError("range projector: every singular value is below the threshold");
    }
    RangeProjector p;
    p.basis = svd.matrixU().leftCols(rank);
    p.sqrt_weights = A.weights.array().sqrt().matrix();
    p.singular_values = s;
    p.tau = tau;
    return p;
}

double residual_to_range(const RangeProjector& P, const BoundaryData& y)
{
    return P.complement(y).l2v_norm();
}

namespace {

ResidualValue regularized_residual(const ForwardMatrix& A, const BoundaryData& y,
                                   double lambda_rel)
{
    if (!(lambda_rel > 0.0)) {
        throw DomainError("regularized residual: lambda_rel must be positive");
    }
    const double s1 = top_singular_value(A);
    ResidualValue out;
    out.lambda = lambda_rel * s1 * s1;
    if (!(s1 > 0.0)) {
        out.value = y.l2v_norm();
        return out;
    }
    const TikhonovSolver solver(A, out.lambda);
    out.value = (A.apply_dofs(solver.solve(y.values)) - y).l2v_norm();
    return out;
}

}  // namespace

ResidualValue residual_to_range(const ForwardMatrix& A, const BoundaryData& y, ResidualMode mode,
                                const ResidualSettings& settings)
{
    if (mode == ResidualMode::Regularized) {
        return regularized_residual(A, y, settings.lambda_rel);
    }
    const RangeProjector p = range_projector(A, settings.tau);
    ResidualValue out;
    out.value = residual_to_range(p, y);
    out.rank = p.rank();
    return out;
}

ResidualValue inf_residual(const PhiMap& map, const PlaneParams& m, const PlaneParams& m0,
                           ResidualMode mode, const ResidualSettings& settings)
{
    const auto A = map.matrix(m);
    return residual_to_range(*A, map(m0), mode, settings);
}

std::vector<RayPoint> inf_residual_ray(const PhiMap& map, const PlaneParams& m0, const Vec3& dir,
                                       const std::vector<double>& ts,
                                       const ResidualSettings& settings)
{
    const double len = dir.norm();
    if (!(len > 0.0)) {
        throw DomainError("residual ray: direction must be non-zero");
    }
    const Vec3 u = dir / len;
    const BoundaryData data = map(m0);
    std::vector<RayPoint> out;
    for (double t : ts) {
        RayPoint p;
        p.t = t;
        p.m = PlaneParams::from_vector(m0.as_vector() + t * u);
        const auto A = map.matrix(p.m);
        p.projection = residual_to_range(*A, data, ResidualMode::Projection, settings).value;
        const ResidualValue reg = residual_to_range(*A, data, ResidualMode::Regularized, settings);
        p.regularized = reg.value;
        p.lambda = reg.lambda;
        out.push_back(p);
    }
    return out;
}

namespace {

PlaneParams uniform_in(const ParamBox& box, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vec3 lo = box.lo.as_vector();
    const Vec3 hi = box.hi.as_vector();
    Vec3 v;
    for (int k = 0; k < 3; ++k) {
        v[k] = lo[k] + u(rng) * (hi[k] - lo[k]);
    }
    return PlaneParams::from_vector(v);
}

Vec3 unit_direction(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v;
    do {
        v = {n(rng), n(rng), n(rng)};
    } while (v.norm() < 1e-8);
    return v.normalized();
}

LipschitzPair evaluate_pair(const PhiMap& map, const PlaneParams& m, const PlaneParams& m2)
{
    LipschitzPair p;
    p.m = m;
    p.m2 = m2;
    p.distance = (m2.as_vector() - m.as_vector()).norm();
    p.ratio = (map(m) - map(m2)).l2v_norm() / p.distance;
    return p;
}

}  // namespace

LipschitzScan lipschitz_scan(const PhiMap& map, const ParamBox& box, int num_pairs,
                             std::uint64_t seed, const std::vector<double>& near_distances)
{
    if (num_pairs < 1) {
        throw DomainError("lipschitz scan: num_pairs must be >= 1");
    }
    box.validate(map.region());
    std::mt19937_64 rng(seed);
    const int near_each = num_pairs / 10;
    const int uniform = std::max(0, num_pairs - near_each * static_cast<int>(near_distances.size()));

    LipschitzScan scan;
    scan.seed = seed;
    for (int k = 0; k < uniform; ++k) {
        PlaneParams m = uniform_in(box, rng);
        PlaneParams m2 = uniform_in(box, rng);
        while (m == m2) {
            m2 = uniform_in(box, rng);
        }
        scan.pairs.push_back(evaluate_pair(map, m, m2));
    }
    for (double delta : near_distances) {
        for (int k = 0; k < near_each; ++k) {
            PlaneParams m;
            PlaneParams m2;
            do {
                m = uniform_in(box, rng);
                const Vec3 step = delta * unit_direction(rng);
                m2 = PlaneParams::from_vector(m.as_vector() + step);
                if (!box.contains(m2)) {
                    m2 = PlaneParams::from_vector(m.as_vector() - step);
                }
            } while (!box.contains(m2));
            LipschitzPair p = evaluate_pair(map, m, m2);
            p.near_diagonal = true;
            const Vec3 q = m2.as_vector() - m.as_vector();
            const PlaneParams mid = PlaneParams::from_vector(0.5 * (m.as_vector() + m2.as_vector()));
            const Eigen::Matrix3d gram = phi_jacobian(map, mid).gram();
            p.predicted = std::sqrt(std::max(0.0, q.dot(gram * q))) / q.norm();
            scan.pairs.push_back(p);
        }
    }
    scan.c_emp = std::numeric_limits<double>::infinity();
    for (const LipschitzPair& p : scan.pairs) {
        if (p.ratio < scan.c_emp) {
            scan.c_emp = p.ratio;
            scan.argmin = p;
        }
    }
    return scan;
}

GridBank::GridBank(std::vector<PlaneParams> nodes, const RegionR& region, const SensorSet& sensors,
                   int quad_order, double tau)
    : nodes_(std::move(nodes)), region_(region)
{
    if (nodes_.empty()) {
        throw DomainError("grid bank: no grid nodes");
    }
    matrices_.reserve(nodes_.size());
    projectors_.reserve(nodes_.size());
    for (const PlaneParams& m : nodes_) {
        matrices_.push_back(assemble_A(m, region_, sensors, quad_order));
        projectors_.push_back(range_projector(matrices_.back(), tau));
    }
}

SetSCheck set_S_check(const SlipGrid& h, const GridBank& bank, double M1, double M2)
{
    if (!(h.region() == bank.region())) {
        throw DomainError("set S check: slip grid does not match the bank region");
    }
    SetSCheck out;
    out.h1_norm = h.h1_norm();
    out.min_data_norm = std::numeric_limits<double>::infinity();
    for (int i = 0; i < bank.size(); ++i) {
        out.min_data_norm = std::min(out.min_data_norm, bank.matrix(i).apply(h).l2v_norm());
    }
    out.upper_slack = M2 - out.h1_norm;
    out.lower_slack = out.min_data_norm - M1;
    out.member = out.upper_slack >= 0.0 && out.lower_slack >= 0.0;
    return out;
}

UniformScan uniform_constant_scan(const GridBank& bank, const std::vector<SlipGrid>& samples,
                                  double M1, double M2, ResidualMode mode,
                                  const ResidualSettings& settings)
{
    if (samples.empty()) {
        throw DomainError("uniform constant scan: no slip samples");
    }
    for (const SlipGrid& h : samples) {
        if (!set_S_check(h, bank, M1, M2).member) {
            throw DomainError("uniform constant scan: a slip sample lies outside S(M1, M2)");
        }
    }
    UniformScan out;
    out.c_emp = std::numeric_limits<double>::infinity();
    for (int s = 0; s < static_cast<int>(samples.size()); ++s) {
        for (int j = 0; j < bank.size(); ++j) {
            const BoundaryData data = bank.matrix(j).apply(samples[s]);
            for (int i = 0; i < bank.size(); ++i) {
                const double dist = (bank.node(i).as_vector() - bank.node(j).as_vector()).norm();
                if (i == j || dist == 0.0) {
                    continue;
                }
                const double r = mode == ResidualMode::Projection
                                     ? residual_to_range(bank.projector(i), data)
                                     : residual_to_range(bank.matrix(i), data, mode, settings).value;
                ++out.pairs;
                if (r / dist < out.c_emp) {
                    out.c_emp = r / dist;
                    out.argmin_m = i;
                    out.argmin_m2 = j;
                    out.argmin_sample = s;
                }
            }
        }
    }
    if (out.pairs == 0) {
        throw DomainError("uniform constant scan: the grid has no distinct node pairs");
    }
    return out;
}

double directional_field_w(const PlaneParams& m, const SlipGrid& h, const Vec3& q, const Point3& x,
                           int quad_order, const SlipGrid* g0)
{
    const RegionR& region = h.region();
    if (x[2] > 0.0) {
        throw DomainError("directional field: point lies above the surface");
    }
    if (!(distance_to_patch(m, region, x) > 1e-6 * std::max(crack_depth_margin(m, region), 1e-300))) {
        throw DomainError("directional field: point lies on the crack");
    }
    if (g0 && !(g0->region() == region)) {
        throw DomainError("directional field: g0 grid does not match the region");
    }
    const PlanarQuadrature pq = make_planar_quadrature(region, quad_order);
    const Vec3 ns = m.scaled_normal();
    const Vec3 grad_f{q[0], q[1], 0.0};
    double w = 0.0;
    for (const auto& p : pq.points) {
        const Point3 y = m.point(p.y1, p.y2);
        const double hv = pq.slip_at(p, h);
        if (hv != 0.0) {
            const double f = q[0] * p.y1 + q[1] * p.y2 + q[2];
            w += p.w * hv * (f * kernel_h_dy3(x, y, ns) - kernel_h(x, y, grad_f));
        }
        if (g0) {
            const double gv = pq.slip_at(p, *g0);
            if (gv != 0.0) {
                w -= p.w * gv * kernel_h(x, y, ns);
            }
        }
    }
    return w;
}

}  // namespace halfcrack
