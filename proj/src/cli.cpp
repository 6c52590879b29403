#include "halfcrack/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include "halfcrack/counterexample.hpp"
#include "halfcrack/csv.hpp"
#include "halfcrack/errors.hpp"
#include "halfcrack/inversion.hpp"
#include "halfcrack/jumps.hpp"
#include "halfcrack/stability.hpp"

namespace halfcrack {

namespace {

namespace fs = std::filesystem;

std::string prepare_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir + "'");
    }
    return dir;
}

std::string join(const std::string& dir, const std::string& name)
{
    return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

// Writes the resolved config next to the results.
std::string write_resolved(const RunConfig& cfg, const std::string& dir)
{
    RunConfig copy = cfg;
    copy.output_dir = dir;
    const std::string path = join(dir, "resolved_config.yaml");
    write_text(path, emit_config(copy));
    return path;
}

std::function<double(double, double)> slip_function(const RunConfig& cfg, const SlipGrid& grid)
{
    if (cfg.slip.family == "tent") {
        return slip_family::tent(cfg.region, cfg.slip.amplitude);
    }
    if (cfg.slip.family == "bump") {
        return slip_family::bump(cfg.slip.center[0], cfg.slip.center[1], cfg.slip.radius,
                                 cfg.slip.amplitude);
    }
    return [grid](double x1, double x2) { return grid.interpolate(x1, x2); };
}

CsvTable slip_table(const SlipGrid& g)
{
    CsvTable t;
    t.header = {"x1", "x2", "value"};
    const RegionR& r = g.region();
    for (int j = 0; j < r.n2; ++j) {
        for (int i = 0; i < r.n1; ++i) {
            t.rows.push_back({r.node_x1(i), r.node_x2(j), g.node(i, j)});
        }
    }
    return t;
}

YAML::Emitter& begin_doc(YAML::Emitter& e)
{
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    return e;
}

void emit_plane(YAML::Emitter& e, const std::string& key, const PlaneParams& m)
{
    e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << m.a << m.b << m.d
      << YAML::EndSeq;
}

std::string end_doc(YAML::Emitter& e)
{
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace

CommandResult cmd_forward(const RunConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    CommandResult res;
    prepare_dir(out_dir);
    const SensorSet sensors = cfg.sensors.build();
    const SlipGrid g = cfg.build_slip();
    SyntheticData opts;
    opts.refine = cfg.forward.refine;
    opts.extra_order = cfg.forward.extra_order;
    opts.noise_rel = cfg.forward.noise_rel;
    opts.seed = cfg.seed;
    const BoundaryData data =
        synthesize_data(cfg.m, cfg.region, sensors, slip_function(cfg, g), cfg.quad_order, opts);

    CsvTable t;
    t.header = {"x1", "x2", "value"};
    for (int i = 0; i < sensors.size(); ++i) {
        t.rows.push_back({sensors.points[i][0], sensors.points[i][1], data.values[i]});
    }
    res.files.push_back(join(out_dir, "boundary_data.csv"));
    write_csv(res.files.back(), t);
    res.files.push_back(join(out_dir, "slip.csv"));
    write_csv(res.files.back(), slip_table(g));

    if (cfg.forward.field_slice) {
        const ForwardConfig& f = cfg.forward;
        CsvTable s;
        s.header = {"x1", "x3", "u"};
        for (int k = 0; k < f.slice_n3; ++k) {
            const double x3 = f.slice_x3_min + k * (f.slice_x3_max - f.slice_x3_min) / (f.slice_n3 - 1);
            for (int i = 0; i < f.slice_n1; ++i) {
                const double x1 =
                    f.slice_x1_min + i * (f.slice_x1_max - f.slice_x1_min) / (f.slice_n1 - 1);
                const Point3 x{x1, 0.0, x3};
                const double margin = crack_depth_margin(cfg.m, cfg.region);
                double u = std::nan("");
                if (distance_to_patch(cfg.m, cfg.region, x) > 1e-6 * margin) {
                    u = eval_field(cfg.m, g, x, cfg.quad_order);
                }
                s.rows.push_back({x1, x3, u});
            }
        }
        res.files.push_back(join(out_dir, "field_slice.csv"));
        write_csv(res.files.back(), s);
    }

    if (cfg.forward.checks) {
        YAML::Emitter e;
        begin_doc(e);
        emit_plane(e, "m", cfg.m);

        std::vector<Point3> probes;
        for (const Point3& p : {Point3(0.5, 0.5, -0.5), Point3(-1.0, 0.5, -2.8),
                                Point3(2.0, -1.0, -1.0), Point3(0.0, 0.0, -3.0),
                                Point3(1.5, 1.5, -1.2)}) {
            if (distance_to_patch(cfg.m, cfg.region, p) >= 0.2) {
                probes.push_back(p);
            }
        }
        if (!probes.empty()) {
            e << YAML::Key << "harmonic_residual" << YAML::Value
              << check_harmonic(cfg.m, g, probes, 1e-3, cfg.quad_order);
        }
        std::vector<Point3> top;
        for (int i = 0; i < sensors.size(); i += std::max(1, sensors.size() / 9)) {
            top.push_back(sensors.point(i));
        }
        const NeumannCheck nc = check_neumann_top(cfg.m, g, top, cfg.quad_order);
        e << YAML::Key << "neumann_top_max_abs" << YAML::Value << nc.max_abs;
        e << YAML::Key << "neumann_top_max_rel" << YAML::Value << nc.max_rel;

        const CrackFrame fr = make_frame(cfg.m);
        Vec3 dir(-cfg.m.a, -cfg.m.b, -0.3);
        dir.normalize();
        const double diam = std::hypot(cfg.region.x1_max - cfg.region.x1_min,
                                       cfg.region.x2_max - cfg.region.x2_min) * fr.sigma;
        e << YAML::Key << "decay" << YAML::Value << YAML::BeginSeq;
        for (double mult : {8.0, 16.0}) {
            const Point3 x = mult * diam * dir;
            const double u1 = eval_field(cfg.m, g, x, cfg.quad_order);
            const double u2 = eval_field(cfg.m, g, 2.0 * x, cfg.quad_order);
            e << YAML::BeginMap << YAML::Key << "distance" << YAML::Value << x.norm()
              << YAML::Key << "ratio_u2x_over_ux" << YAML::Value << u2 / u1 << YAML::EndMap;
        }
        e << YAML::EndSeq;

        e << YAML::Key << "jump_recovery" << YAML::Value << YAML::BeginSeq;
        const RegionR& r = cfg.region;
        for (const auto& frac : {std::array<double, 2>{0.5625, 0.6875}, {0.3125, 0.4375},
                                 {0.5, 0.5}, {0.75, 0.25}, {0.25, 0.8125}}) {
            const double y1 = r.x1_min + frac[0] * (r.x1_max - r.x1_min);
            const double y2 = r.x2_min + frac[1] * (r.x2_max - r.x2_min);
            const JumpRecovery jr =
                recover_jump(cfg.m, g, y1, y2, {0.04, 0.02, 0.01, 0.005}, cfg.quad_order);
            e << YAML::BeginMap << YAML::Key << "y" << YAML::Value << YAML::Flow << YAML::BeginSeq
              << y1 << y2 << YAML::EndSeq << YAML::Key << "slip" << YAML::Value << jr.slip
              << YAML::Key << "extrapolated_jump" << YAML::Value << jr.extrapolated << YAML::EndMap;
        }
        e << YAML::EndSeq;
        res.files.push_back(join(out_dir, "checks.yaml"));
        write_text(res.files.back(), end_doc(e));
    }
    res.files.push_back(write_resolved(cfg, out_dir));
    log << "forward: wrote " << res.files.size() << " files to " << out_dir << "\n";
    return res;
}

BoundaryData read_boundary_data(const std::string& path, const SensorSet& sensors)
{
    const CsvTable t = read_csv(path);
    const int c1 = t.column("x1");
    const int c2 = t.column("x2");
    const int cv = t.column("value");
    if (c1 < 0 || c2 < 0 || cv < 0) {
        throw DomainError(path + ": boundary data needs columns x1, x2, value");
    }
    std::map<std::array<double, 2>, int> index;
    for (int i = 0; i < sensors.size(); ++i) {
        index[sensors.points[i]] = i;
    }
    BoundaryData d{Eigen::VectorXd::Constant(sensors.size(), std::nan("")),
                   sensors.weight_vector()};
    std::vector<bool> seen(sensors.size(), false);
    for (const auto& row : t.rows) {
        // Points written by the forward command round-trip exactly; allow a
        // small tolerance for hand-made files.
        int hit = -1;
        auto it = index.find({row[c1], row[c2]});
        if (it != index.end()) {
            hit = it->second;
        } else {
            for (int i = 0; i < sensors.size(); ++i) {
                if (std::abs(sensors.points[i][0] - row[c1]) <= 1e-9 &&
                    std::abs(sensors.points[i][1] - row[c2]) <= 1e-9) {
                    hit = i;
                    break;
                }
            }
        }
        if (hit < 0) {
            throw DomainError(path + ": point (" + format_double(row[c1]) + ", " +
                              format_double(row[c2]) + ") is not a configured sensor");
        }
        if (seen[hit]) {
            throw DomainError(path + ": sensor (" + format_double(row[c1]) + ", " +
                              format_double(row[c2]) + ") appears twice");
        }
        seen[hit] = true;
        d.values[hit] = row[cv];
    }
    for (int i = 0; i < sensors.size(); ++i) {
        if (!seen[i]) {
            throw DomainError(path + ": no value for sensor (" + format_double(sensors.points[i][0]) +
                              ", " + format_double(sensors.points[i][1]) + ")");
        }
    }
    return d;
}

CommandResult cmd_invert(const RunConfig& cfg, const std::string& data_path,
                         const std::string& out_dir, std::ostream& log)
{
    CommandResult res;
    const InverseConfig icfg = cfg.inverse_config();
    const BoundaryData data = read_boundary_data(data_path, icfg.sensors);
    prepare_dir(out_dir);
    const InverseResult r = reconstruct(data, icfg);

    YAML::Emitter e;
    begin_doc(e);
    emit_plane(e, "m_star", r.m_star);
    e << YAML::Key << "residual" << YAML::Value << r.residual;
    e << YAML::Key << "lambda" << YAML::Value << r.lambda;
    e << YAML::Key << "lambda_rel" << YAML::Value << icfg.lambda_rel;
    e << YAML::Key << "iterations" << YAML::Value << r.iterations;
    e << YAML::Key << "converged" << YAML::Value << r.converged;
    e << YAML::Key << "on_boundary" << YAML::Value << r.on_boundary;
    e << YAML::Key << "slip_h1_norm" << YAML::Value << r.g_star.h1_norm();
    res.files.push_back(join(out_dir, "result.yaml"));
    write_text(res.files.back(), end_doc(e));

    res.files.push_back(join(out_dir, "slip.csv"));
    write_csv(res.files.back(), slip_table(r.g_star));

    CsvTable starts;
    starts.header = {"start_a", "start_b", "start_d", "a", "b", "d", "residual", "iterations",
                     "converged"};
    for (const StartTrace& s : r.trace) {
        starts.rows.push_back({s.start.a, s.start.b, s.start.d, s.m.a, s.m.b, s.m.d, s.residual,
                               static_cast<double>(s.iterations), s.converged ? 1.0 : 0.0});
    }
    res.files.push_back(join(out_dir, "starts.csv"));
    write_csv(res.files.back(), starts);
    res.files.push_back(write_resolved(cfg, out_dir));

    log << "invert: m* = (" << format_double(r.m_star.a) << ", " << format_double(r.m_star.b)
        << ", " << format_double(r.m_star.d) << "), residual " << format_double(r.residual)
        << (r.converged ? "" : " (not converged)") << "\n";
    if (!r.converged) {
        res.exit_code = kExitNumerical;
    }
    return res;
}

CommandResult cmd_stability(const RunConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    CommandResult res;
    prepare_dir(out_dir);
    const StabilityConfig& sc = cfg.stability;
    const SensorSet sensors = cfg.sensors.build();
    const SlipGrid h = cfg.build_slip();
    const PhiMap map(h, sensors, cfg.quad_order);
    const ResidualSettings rs{sc.tau, sc.lambda_rel};

    CsvTable spectrum;
    spectrum.header = {"k", "sigma_rel"};
    const Eigen::VectorXd sv = relative_singular_values(*map.matrix(cfg.m));
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        spectrum.rows.push_back({static_cast<double>(k + 1), sv[k]});
    }
    res.files.push_back(join(out_dir, "spectrum.csv"));
    write_csv(res.files.back(), spectrum);

    CsvTable gram;
    gram.header = {"a", "b", "d", "gram_min_eig"};
    double gram_min = std::numeric_limits<double>::infinity();
    for (const PlaneParams& m : cfg.box.grid(sc.gram_grid, sc.gram_grid, sc.gram_grid)) {
        const double ev = gram_min_eig(phi_jacobian(map, m));
        gram_min = std::min(gram_min, ev);
        gram.rows.push_back({m.a, m.b, m.d, ev});
    }
    res.files.push_back(join(out_dir, "gram_grid.csv"));
    write_csv(res.files.back(), gram);

    const LipschitzScan scan = lipschitz_scan(map, cfg.box, sc.num_pairs, cfg.seed);
    CsvTable pairs;
    pairs.header = {"a", "b", "d", "a2", "b2", "d2", "distance", "ratio", "near_diagonal",
                    "predicted"};
    for (const LipschitzPair& p : scan.pairs) {
        pairs.rows.push_back({p.m.a, p.m.b, p.m.d, p.m2.a, p.m2.b, p.m2.d, p.distance, p.ratio,
                              p.near_diagonal ? 1.0 : 0.0, p.predicted.value_or(std::nan(""))});
    }
    res.files.push_back(join(out_dir, "pairs.csv"));
    write_csv(res.files.back(), pairs);

    const Vec3 dir(sc.ray_direction[0], sc.ray_direction[1], sc.ray_direction[2]);
    const auto ray = inf_residual_ray(map, cfg.m, dir, sc.ray_t, rs);
    CsvTable rt;
    rt.header = {"t", "a", "b", "d", "projection", "regularized", "lambda"};
    for (const RayPoint& p : ray) {
        rt.rows.push_back({p.t, p.m.a, p.m.b, p.m.d, p.projection, p.regularized, p.lambda});
    }
    res.files.push_back(join(out_dir, "ray.csv"));
    write_csv(res.files.back(), rt);

    const int ng = sc.uniform_grid;
    const GridBank bank(cfg.box.grid(ng, ng, ng), cfg.region, sensors, cfg.quad_order, sc.tau);
    const SetSCheck sset = set_S_check(h, bank, 0.0, std::numeric_limits<double>::infinity());
    const double M1 = 0.5 * sset.min_data_norm;
    const double M2 = 2.0 * sset.h1_norm;
    std::optional<UniformScan> uniform;
    if (sset.min_data_norm > 0.0) {
        uniform = uniform_constant_scan(bank, {h}, M1, M2, ResidualMode::Projection, rs);
    }

    YAML::Emitter e;
    begin_doc(e);
    emit_plane(e, "m", cfg.m);
    e << YAML::Key << "seed" << YAML::Value << cfg.seed;
    e << YAML::Key << "tau" << YAML::Value << sc.tau;
    e << YAML::Key << "lambda_rel" << YAML::Value << sc.lambda_rel;
    e << YAML::Key << "lambda" << YAML::Value << (ray.empty() ? 0.0 : ray.front().lambda);
    e << YAML::Key << "gram_min_eig" << YAML::Value << gram_min;
    e << YAML::Key << "gram_grid" << YAML::Value << sc.gram_grid;
    e << YAML::Key << "c_emp" << YAML::Value << scan.c_emp;
    e << YAML::Key << "num_pairs" << YAML::Value << static_cast<int>(scan.pairs.size());
    emit_plane(e, "c_emp_m", scan.argmin.m);
    emit_plane(e, "c_emp_m2", scan.argmin.m2);
    e << YAML::Key << "uniform_grid" << YAML::Value << ng;
    e << YAML::Key << "set_S_M1" << YAML::Value << M1;
    e << YAML::Key << "set_S_M2" << YAML::Value << M2;
    e << YAML::Key << "uniform_c_emp" << YAML::Value;
    if (uniform) {
        e << uniform->c_emp;
    } else {
        e << YAML::Null;
    }
    res.files.push_back(join(out_dir, "summary.yaml"));
    write_text(res.files.back(), end_doc(e));
    res.files.push_back(write_resolved(cfg, out_dir));
    log << "stability: C_emp = " << format_double(scan.c_emp) << ", min Gram eigenvalue "
        << format_double(gram_min) << "\n";
    return res;
}

CommandResult cmd_jumps(const RunConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    CommandResult res;
    prepare_dir(out_dir);
    const TestPair pair = default_test_pair();
    CsvTable t;
    t.header = {"a", "b", "d", "kind", "rhs", "extrapolated", "rel_err", "first_order"};
    for (size_t k = 0; k < cfg.jumps.eps.size(); ++k) {
        t.header.push_back("lhs_eps_" + format_double(cfg.jumps.eps[k]));
    }
    double worst = 0.0;
    for (const PlaneParams& m : cfg.jumps.planes) {
        const auto reports = verify_all_jumps(m, pair, cfg.jumps.eps, cfg.jumps.quadrature);
        for (const JumpReport& r : reports) {
            std::vector<double> row{m.a, m.b, m.d, static_cast<double>(kind_index(r.kind)),
                                    r.rhs, r.extrapolated, r.rel_err, r.first_order ? 1.0 : 0.0};
            row.insert(row.end(), r.lhs.begin(), r.lhs.end());
            t.rows.push_back(std::move(row));
            worst = std::max(worst, r.rel_err);
        }
    }
    res.files.push_back(join(out_dir, "jumps.csv"));
    write_csv(res.files.back(), t);

    // Kind indices in jumps.csv refer to this table.
    std::string names = "kind,name\n";
    for (JumpKind k : kAllJumpKinds) {
        names += std::to_string(kind_index(k)) + "," + std::string(to_string(k)) + "\n";
    }
    res.files.push_back(join(out_dir, "jump_kinds.csv"));
    write_text(res.files.back(), names);
    res.files.push_back(write_resolved(cfg, out_dir));
    log << "jumps: " << t.rows.size() << " rows, worst rel_err " << format_double(worst) << "\n";
    return res;
}

CommandResult cmd_counterexample(const RunConfig& cfg, const std::string& out_dir,
                                 std::ostream& log)
{
    CommandResult res;
    prepare_dir(out_dir);
    const CounterexampleSetup& setup = cfg.counterexample.setup;
    const SensorSet sensors = cfg.counterexample.sensors.build();
    CsvTable f;
    f.header = {"x1", "x2", "u_low", "u_high", "diff", "dx3_low", "dx3_high"};
    for (int i = 0; i < sensors.size(); ++i) {
        const Point3 x = sensors.point(i);
        const double u1 = eval_counterexample_field(CapKind::Low, x, setup);
        const double u2 = eval_counterexample_field(CapKind::High, x, setup);
        f.rows.push_back({x[0], x[1], u1, u2, u1 - u2,
                          eval_counterexample_dx3(CapKind::Low, x, setup),
                          eval_counterexample_dx3(CapKind::High, x, setup)});
    }
    res.files.push_back(join(out_dir, "field.csv"));
    write_csv(res.files.back(), f);

    const Indistinguishability ind = verify_indistinguishable(sensors, setup);
    CsvTable p;
    p.header = {"x1", "x2", "x3", "inside", "diff", "expected"};
    for (const Point3& x : {Point3(0, 0, -2), Point3(0.4, 0, -2), Point3(0, -0.4, -1.9),
                            Point3(0.3, 0.3, -2.1), Point3(0, 0, -1.8), Point3(0, 0, -10),
                            Point3(3, 0, -2), Point3(0, 0, -0.5), Point3(1.5, 1.5, -1),
                            Point3(0, 0, -4)}) {
        const bool inside = CounterexampleSetup::inside_lens(x);
        const double d = eval_counterexample_field(CapKind::Low, x, setup) -
                         eval_counterexample_field(CapKind::High, x, setup);
        p.rows.push_back({x[0], x[1], x[2], inside ? 1.0 : 0.0, d, inside ? -3.0 : 0.0});
    }
    res.files.push_back(join(out_dir, "probes.csv"));
    write_csv(res.files.back(), p);

    YAML::Emitter e;
    begin_doc(e);
    e << YAML::Key << "max_abs_diff" << YAML::Value << ind.max_diff;
    e << YAML::Key << "max_abs_dx3_diff" << YAML::Value << ind.max_dx3_diff;
    e << YAML::Key << "field_scale" << YAML::Value << ind.scale;
    e << YAML::Key << "rel_diff" << YAML::Value << ind.rel_diff();
    e << YAML::Key << "rel_dx3_diff" << YAML::Value << ind.rel_dx3_diff();
    res.files.push_back(join(out_dir, "summary.yaml"));
    write_text(res.files.back(), end_doc(e));
    res.files.push_back(write_resolved(cfg, out_dir));
    log << "counterexample: relative surface difference " << format_double(ind.rel_diff())
        << "\n";
    return res;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Planar crack identification in the half space from surface data"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string data_path;
    app.add_option("--config", config_path, "YAML run configuration (defaults if omitted)");
    app.add_option("--out", out_dir, "output directory (overrides output.directory)");
    app.add_option("--seed", seed, "random seed (overrides seed)");
    auto* forward = app.add_subcommand("forward", "synthetic boundary data and PDE checks");
    auto* invert = app.add_subcommand("invert", "recover plane and slip from boundary data");
    invert->add_option("--data", data_path, "CSV with columns x1,x2,value")->required();
    auto* stability = app.add_subcommand("stability", "rank, Lipschitz and residual scans");
    auto* jumps = app.add_subcommand("jumps", "weak jump relations across a plane");
    auto* counter = app.add_subcommand("counterexample", "two graph cracks with equal surface data");
    for (auto* sub : {forward, invert, stability, jumps, counter}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig cfg = config_path.empty() ? parse_config("", "<defaults>") : load_config(config_path);
        if (seed) {
            cfg.seed = *seed;
        }
        const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
        CommandResult r;
        if (*forward) {
            r = cmd_forward(cfg, dir, out);
        } else if (*invert) {
            r = cmd_invert(cfg, data_path, dir, out);
        } else if (*stability) {
            r = cmd_stability(cfg, dir, out);
        } else if (*jumps) {
            r = cmd_jumps(cfg, dir, out);
        } else {
            r = cmd_counterexample(cfg, dir, out);
        }
        return r.exit_code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace halfcrack
