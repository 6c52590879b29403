#include "halfcrack/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "halfcrack/errors.hpp"
#include "halfcrack/tikhonov.hpp"

namespace halfcrack {

void InverseConfig::validate() const
{
    region.validate();
    box.validate(region);
    sensors.validate();
    if (!(lambda_rel > 0.0)) {
        throw DomainError("inversion: lambda_rel must be positive");
    }
    if (!(tol > 0.0)) {
        throw DomainError("inversion: tol must be positive");
    }
    if (max_iter < 1) {
        throw DomainError("inversion: max_iter must be >= 1");
    }
    for (int s : starts) {
        if (s < 1) {
            throw DomainError("inversion: multistart counts must be >= 1");
        }
    }
    if (quad_order < 1) {
        throw DomainError("inversion: quadrature order must be >= 1");
    }
}

SlipGrid solve_slip(const PlaneParams& m, const BoundaryData& data, double lambda,
                    const RegionR& region, const SensorSet& sensors, int quad_order)
{
    const ForwardMatrix A = assemble_A(m, region, sensors, quad_order);
    if (data.values.size() != A.entries.rows()) {
        throw DomainError("slip solve: data length does not match the sensor set");
    }
    return SlipGrid::from_dofs(region, TikhonovSolver(A, lambda).solve(data.values));
}

double objective(const PlaneParams& m, const BoundaryData& data, double lambda,
                 const RegionR& region, const SensorSet& sensors, int quad_order)
{
    const ForwardMatrix A = assemble_A(m, region, sensors, quad_order);
    if (data.values.size() != A.entries.rows()) {
        throw DomainError("objective: data length does not match the sensor set");
    }
    const Eigen::VectorXd g = TikhonovSolver(A, lambda).solve(data.values);
    return (A.apply_dofs(g) - data).l2v_norm();
}

double resolve_lambda(const InverseConfig& cfg)
{
    const ForwardMatrix A = assemble_A(cfg.box.center(), cfg.region, cfg.sensors, cfg.quad_order);
    const double s1 = top_singular_value(A);
    return cfg.lambda_rel * s1 * s1;
}

namespace {

// Everything the Gauss-Newton loop needs at one plane.
struct Evaluation {
    PlaneParams m;
    std::shared_ptr<const ForwardMatrix> A;
    std::shared_ptr<const TikhonovSolver> solver;
    Eigen::VectorXd g;  ///< slip dofs
    Eigen::VectorXd r;  ///< W^{1/2} (A g - y)
    double misfit2 = 0.0;  ///< |r|^2
    double penalized = 0.0;  ///< |r|^2 + lambda g' K g
};

class Problem {
public:
    Problem(const BoundaryData& data, const InverseConfig& cfg, double lambda)
        : data_(data), cfg_(cfg), lambda_(lambda), k_(h1_gram(cfg.region)),
          sqrt_w_(cfg.sensors.weight_vector().array().sqrt().matrix())
    {
    }

    Evaluation evaluate(const PlaneParams& m) const
    {
        Evaluation e;
        e.m = m;
        e.A = std::make_shared<const ForwardMatrix>(
            assemble_A(m, cfg_.region, cfg_.sensors, cfg_.quad_order));
        e.solver = std::make_shared<const TikhonovSolver>(*e.A, lambda_);
        e.g = e.solver->solve(data_.values);
        e.r = sqrt_w_.cwiseProduct(e.A->entries * e.g - data_.values);
        e.misfit2 = e.r.squaredNorm();
        e.penalized = e.misfit2 + lambda_ * e.g.dot(k_ * e.g);
        return e;
    }

    // Reduced Jacobian of r in m with g(m) differentiated through the
    // regularized solve, dropping the second-order term in the residual:
    //   J = (I - W^{1/2} A M^{-1} A' W^{1/2}) W^{1/2} (dA/dm) g.
    Eigen::Matrix<double, Eigen::Dynamic, 3> jacobian(const Evaluation& e,
                                                      Eigen::Matrix<double, Eigen::Dynamic, 3>& c) const
    {
        const SlipGrid g = SlipGrid::from_dofs(cfg_.region, e.g);
        const auto cols = assemble_dA_dm_applied(e.m, cfg_.region, cfg_.sensors, g, cfg_.quad_order);
        c.resize(sqrt_w_.size(), 3);
        for (int k = 0; k < 3; ++k) {
            c.col(k) = sqrt_w_.cwiseProduct(cols[k].values);
        }
        const Eigen::MatrixXd z = e.solver->solve_scaled(c);
        return c - e.A->weighted() * z;
    }

    const InverseConfig& cfg() const { return cfg_; }

private:
    const BoundaryData& data_;
    const InverseConfig& cfg_;
    double lambda_;
    Eigen::MatrixXd k_;
    Eigen::VectorXd sqrt_w_;
};

struct StartOutcome {
    Evaluation best;
    int iterations = 0;
    bool converged = false;
};

StartOutcome gauss_newton(const Problem& prob, const PlaneParams& start)
{
    const InverseConfig& cfg = prob.cfg();
    StartOutcome out;
    Evaluation cur = prob.evaluate(start);
    double mu = 1e-3;
    for (int it = 0; it < cfg.max_iter; ++it) {
        out.iterations = it + 1;
        Eigen::Matrix<double, Eigen::Dynamic, 3> c;
        const Eigen::Matrix<double, Eigen::Dynamic, 3> j = prob.jacobian(cur, c);
        const Eigen::Matrix3d jtj = j.transpose() * j;
        // Gradient of the penalized functional in m at the optimal slip.
        const Eigen::Vector3d grad = c.transpose() * cur.r;
        bool accepted = false;
        double step_norm = 0.0;
        for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
            Eigen::Matrix3d lhs = jtj;
            lhs.diagonal() += mu * jtj.diagonal().cwiseMax(1e-300);
            const Eigen::Vector3d delta = -lhs.ldlt().solve(grad);
            const PlaneParams trial =
                cfg.box.clamp(PlaneParams::from_vector(cur.m.as_vector() + delta));
            step_norm = (trial.as_vector() - cur.m.as_vector()).norm();
            if (step_norm == 0.0) {
                break;
            }
            const Evaluation next = prob.evaluate(trial);
            if (next.penalized <= cur.penalized) {
                cur = next;
                accepted = true;
                mu = std::max(mu / 3.0, 1e-12);
            } else {
                mu *= 4.0;
            }
        }
        if (!accepted || step_norm < cfg.tol) {
            // Either the step fell below tol or no damped step decreases the
            // functional; both mean stationarity within the step resolution.
            out.converged = true;
            break;
        }
    }
    out.best = cur;
    return out;
}

}  // namespace

InverseResult reconstruct(const BoundaryData& data, const InverseConfig& cfg)
{
    cfg.validate();
    if (data.values.size() == 0) {
        throw DomainError("reconstruct: data is empty");
    }
    if (data.values.size() != cfg.sensors.size()) {
        throw DomainError("reconstruct: data length does not match the sensor set");
    }
    if (!data.values.allFinite()) {
        throw DomainError("reconstruct: data contains non-finite values");
    }
    const double lambda = resolve_lambda(cfg);
    const Problem prob(data, cfg, lambda);

    InverseResult res{.m_star = {}, .g_star = SlipGrid(cfg.region), .trace = {}};
    res.lambda = lambda;
    const auto starts = cfg.box.cell_centers(cfg.starts[0], cfg.starts[1], cfg.starts[2]);
    const Evaluation* best = nullptr;
    std::vector<StartOutcome> outcomes;
    outcomes.reserve(starts.size());
    for (const PlaneParams& s : starts) {
        outcomes.push_back(gauss_newton(prob, s));
        const StartOutcome& o = outcomes.back();
        res.trace.push_back({s, o.best.m, std::sqrt(o.best.misfit2), o.iterations, o.converged});
    }
    int best_idx = -1;
    auto better = [&](const StartOutcome& a, const StartOutcome& b) {
        const double fa = a.best.misfit2;
        const double fb = b.best.misfit2;
        const double scale = std::max({fa, fb, 1e-300});
        if (std::abs(fa - fb) > 1e-12 * scale) {
            return fa < fb;
        }
        const Vec3 va = a.best.m.as_vector();
        const Vec3 vb = b.best.m.as_vector();
        if (va.norm() != vb.norm()) {
            return va.norm() < vb.norm();
        }
        return std::lexicographical_compare(va.data(), va.data() + 3, vb.data(), vb.data() + 3);
    };
    for (int k = 0; k < static_cast<int>(outcomes.size()); ++k) {
        if (best_idx < 0 || better(outcomes[k], outcomes[best_idx])) {
            best_idx = k;
        }
    }
    best = &outcomes[best_idx].best;
    res.m_star = best->m;
    res.g_star = SlipGrid::from_dofs(cfg.region, best->g);
    const ForwardMatrix A = assemble_A(res.m_star, cfg.region, cfg.sensors, cfg.quad_order);
    res.residual = (A.apply(res.g_star) - data).l2v_norm();
    res.iterations = outcomes[best_idx].iterations;
    res.converged = outcomes[best_idx].converged;
    res.on_boundary = cfg.box.on_boundary(res.m_star, 1e-9);
    if (res.on_boundary) {
        res.converged = false;
    }
    return res;
}

RegionR refined(const RegionR& region, int factor)
{
    if (factor < 1) {
        throw DomainError("refinement factor must be >= 1");
    }
    RegionR r = region;
    r.n1 = (region.n1 - 1) * factor + 1;
    r.n2 = (region.n2 - 1) * factor + 1;
    return r;
}

BoundaryData synthesize_data(const PlaneParams& m, const RegionR& region, const SensorSet& sensors,
                             const std::function<double(double, double)>& slip, int quad_order,
                             const SyntheticData& opts)
{
    if (!(opts.noise_rel >= 0.0)) {
        throw DomainError("synthetic data: noise level must be >= 0");
    }
    const RegionR fine = refined(region, opts.refine);
    const SlipGrid g = SlipGrid::from_function(fine, slip);
    const ForwardMatrix A = assemble_A(m, fine, sensors, quad_order + opts.extra_order);
    BoundaryData d = A.apply(g);
    if (opts.noise_rel > 0.0) {
        const double rms = std::sqrt(d.values.squaredNorm() / static_cast<double>(d.values.size()));
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> n(0.0, 1.0);
        for (Eigen::Index i = 0; i < d.values.size(); ++i) {
            d.values[i] += opts.noise_rel * rms * n(rng);
        }
    }
    return d;
}

}  // namespace halfcrack
