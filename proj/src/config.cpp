#include "halfcrack/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "halfcrack/csv.hpp"
#include "halfcrack/errors.hpp"

namespace halfcrack {

namespace {

std::string where(const std::string& source, const YAML::Mark& mark)
{
    if (mark.is_null()) {
        return source + ": ";
    }
    return source + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) +
           ": ";
}

// Reads keys out of one YAML mapping and rejects whatever is left over.
class MapReader {
public:
    MapReader(const YAML::Node& node, std::string prefix, RunConfig& cfg)
        : node_(node), prefix_(std::move(prefix)), cfg_(cfg)
    {
        if (node_ && !node_.IsNull() && !node_.IsMap()) {
            fail(node_.Mark(), "'" + label() + "' must be a mapping");
        }
    }

    template <typename T>
    void scalar(const std::string& key, T& target)
    {
        const YAML::Node n = take(key);
        if (!n) {
            return;
        }
        if (!n.IsScalar()) {
            fail(n.Mark(), "'" + path(key) + "' must be a scalar");
        }
        try {
            target = n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n.Mark(), "'" + path(key) + "' has an invalid value '" + n.Scalar() + "'");
        }
    }

    template <typename T>
    void sequence(const std::string& key, std::vector<T>& target)
    {
        const YAML::Node n = take(key);
        if (!n) {
            return;
        }
        if (!n.IsSequence()) {
            fail(n.Mark(), "'" + path(key) + "' must be a list");
        }
        std::vector<T> out;
        for (const auto& item : n) {
            try {
                out.push_back(item.as<T>());
            } catch (const YAML::Exception&) {
                fail(item.Mark(), "'" + path(key) + "' contains an invalid entry");
            }
        }
        target = std::move(out);
    }

    template <typename T, std::size_t N>
    void fixed(const std::string& key, std::array<T, N>& target)
    {
        std::vector<T> v;
        const YAML::Node n = lookup(key);
        sequence(key, v);
        if (!n) {
            return;
        }
        if (v.size() != N) {
            fail(n.Mark(), "'" + path(key) + "' must have " + std::to_string(N) + " entries");
        }
        std::copy(v.begin(), v.end(), target.begin());
    }

    YAML::Node child(const std::string& key) { return take(key); }

    void finish() const
    {
        if (!node_ || !node_.IsMap()) {
            return;
        }
        for (const auto& kv : node_) {
            const std::string key = kv.first.as<std::string>();
            if (!used_.count(key)) {
                fail(kv.first.Mark(), "unknown key '" + path(key) + "'");
            }
        }
    }

    std::string path(const std::string& key) const
    {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    [[noreturn]] void fail(const YAML::Mark& mark, const std::string& msg) const
    {
        throw ConfigError(where(cfg_.source, mark) + msg);
    }

private:
    std::string label() const { return prefix_.empty() ? "document" : prefix_; }

    YAML::Node lookup(const std::string& key) const
    {
        if (!node_ || !node_.IsMap()) {
            return YAML::Node(YAML::NodeType::Undefined);
        }
        const YAML::Node& cn = node_;
        return cn[key];
    }

    YAML::Node take(const std::string& key)
    {
        used_.insert(key);
        if (!node_ || !node_.IsMap()) {
            return YAML::Node(YAML::NodeType::Undefined);
        }
        YAML::Node n = lookup(key);
        if (n) {
            cfg_.lines[path(key)] = n.Mark().line + 1;
        }
        return n;
    }

    YAML::Node node_;
    std::string prefix_;
    RunConfig& cfg_;
    std::set<std::string> used_;
};

PlaneParams plane_from(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
std::array<double, 3> array_from(const PlaneParams& m) { return {m.a, m.b, m.d}; }

void read_sensor_grid(MapReader& r, SensorGridConfig& s)
{
    r.scalar("x1_min", s.x1_min);
    r.scalar("x1_max", s.x1_max);
    r.scalar("x2_min", s.x2_min);
    r.scalar("x2_max", s.x2_max);
    r.scalar("n1", s.n1);
    r.scalar("n2", s.n2);
}

std::string line_of(const RunConfig& cfg, const std::string& key)
{
    auto it = cfg.lines.find(key);
    if (it == cfg.lines.end()) {
        return cfg.source + ": ";
    }
    return cfg.source + ":" + std::to_string(it->second) + ": ";
}

// Runs a module validator and re-labels its DomainError with the key's line.
template <typename F>
void check(const RunConfig& cfg, const std::string& key, F&& f)
{
    try {
        f();
    } catch (const DomainError& e) {
        throw ConfigError(line_of(cfg, key) + key + ": " + e.what());
    }
}

void require(const RunConfig& cfg, bool ok, const std::string& key, const std::string& msg)
{
    if (!ok) {
        throw ConfigError(line_of(cfg, key) + key + ": " + msg);
    }
}

void validate(const RunConfig& cfg)
{
    check(cfg, "region", [&] { cfg.region.validate(); });
    check(cfg, "sensors", [&] { cfg.sensors.build().validate(); });
    check(cfg, "counterexample.sensors", [&] { cfg.counterexample.sensors.build().validate(); });
    require(cfg, crack_depth_margin(cfg.m, cfg.region) > 0.0, "crack.m",
            "crack plane reaches the surface: distance to x3=0 is " +
                format_double(crack_depth_margin(cfg.m, cfg.region)) + " (must be > 0)");
    check(cfg, "crack.box", [&] { cfg.box.validate(cfg.region); });
    require(cfg, cfg.quad_order >= 1 && cfg.quad_order <= 64, "quadrature.order",
            "must lie in [1, 64]");
    const std::string& fam = cfg.slip.family;
    require(cfg, fam == "tent" || fam == "bump" || fam == "nodal", "slip.family",
            "must be one of tent, bump, nodal");
    require(cfg, fam != "bump" || cfg.slip.radius > 0.0, "slip.radius", "must be > 0");
    require(cfg, fam != "nodal" || !cfg.slip.path.empty(), "slip.path",
            "a nodal slip needs a CSV path");
    require(cfg, cfg.forward.refine >= 1, "forward.refine", "must be >= 1");
    require(cfg, cfg.forward.extra_order >= 0 && cfg.quad_order + cfg.forward.extra_order <= 64,
            "forward.extra_order", "must be >= 0 with order + extra_order <= 64");
    require(cfg, cfg.forward.noise_rel >= 0.0, "forward.noise_rel", "must be >= 0");
    require(cfg, cfg.forward.slice_n1 >= 2 && cfg.forward.slice_n3 >= 2, "forward.slice_n1",
            "slice counts must be >= 2");
    require(cfg, cfg.forward.slice_x3_max < 0.0 && cfg.forward.slice_x3_min < cfg.forward.slice_x3_max,
            "forward.slice_x3_max", "slice must lie strictly below the surface");
    require(cfg, cfg.stability.tau > 0.0 && cfg.stability.tau < 1.0, "stability.tau",
            "must lie in (0, 1)");
    require(cfg, cfg.stability.lambda_rel > 0.0, "stability.lambda_rel", "must be > 0");
    require(cfg, cfg.stability.num_pairs >= 1, "stability.num_pairs", "must be >= 1");
    require(cfg, cfg.stability.gram_grid >= 1, "stability.gram_grid", "must be >= 1");
    require(cfg, cfg.stability.uniform_grid >= 2, "stability.uniform_grid", "must be >= 2");
    require(cfg, !cfg.stability.ray_t.empty(), "stability.ray_t", "must not be empty");
    for (double t : cfg.stability.ray_t) {
        require(cfg, t > 0.0, "stability.ray_t", "entries must be > 0");
    }
    const auto& dir = cfg.stability.ray_direction;
    require(cfg, dir[0] != 0.0 || dir[1] != 0.0 || dir[2] != 0.0, "stability.ray_direction",
            "must be non-zero");
    check(cfg, "inversion", [&] { cfg.inverse_config().validate(); });
    require(cfg, !cfg.jumps.planes.empty(), "jumps.planes", "must not be empty");
    for (const auto& p : cfg.jumps.planes) {
        check(cfg, "jumps.planes", [&] { make_frame(p); });
    }
    require(cfg, cfg.jumps.eps.size() >= 3, "jumps.eps", "needs at least three values");
    for (size_t k = 1; k < cfg.jumps.eps.size(); ++k) {
        require(cfg, cfg.jumps.eps[k] > 0.0 && cfg.jumps.eps[k] < cfg.jumps.eps[k - 1], "jumps.eps",
                "must be positive and strictly decreasing");
    }
    const JumpQuadrature& jq = cfg.jumps.quadrature;
    require(cfg, jq.outer_cells >= 1 && jq.inner_cells >= 1 && jq.outer_order >= 1 &&
                     jq.outer_order <= 64 && jq.inner_order >= 1 && jq.inner_order <= 64 &&
                     jq.near_factor > 0.0,
            "jumps", "quadrature settings must be positive with orders <= 64");
    check(cfg, "counterexample", [&] { cfg.counterexample.setup.validate(); });
    require(cfg, !cfg.output_dir.empty(), "output.directory", "must not be empty");
}

}  // namespace

SlipGrid RunConfig::build_slip() const
{
    if (slip.family == "tent") {
        return SlipGrid::from_function(region, slip_family::tent(region, slip.amplitude));
    }
    if (slip.family == "bump") {
        return SlipGrid::from_function(
            region, slip_family::bump(slip.center[0], slip.center[1], slip.radius, slip.amplitude));
    }
    const CsvTable t = read_csv(slip.path);
    const int c1 = t.column("x1");
    const int c2 = t.column("x2");
    const int cv = t.column("value");
    if (c1 < 0 || c2 < 0 || cv < 0) {
        throw DomainError(slip.path + ": nodal slip needs columns x1, x2, value");
    }
    SlipGrid g(region);
    const double tol = 1e-9 * std::max(region.h1(), region.h2());
    for (const auto& row : t.rows) {
        const double fi = (row[c1] - region.x1_min) / region.h1();
        const double fj = (row[c2] - region.x2_min) / region.h2();
        const int i = static_cast<int>(std::lround(fi));
        const int j = static_cast<int>(std::lround(fj));
        if (i < 0 || j < 0 || i >= region.n1 || j >= region.n2 ||
            std::abs(region.node_x1(i) - row[c1]) > tol ||
            std::abs(region.node_x2(j) - row[c2]) > tol) {
            throw DomainError(slip.path + ": point (" + format_double(row[c1]) + ", " +
                              format_double(row[c2]) + ") is not a node of the region grid");
        }
        g.set_node(i, j, row[cv]);
    }
    return g;
}

InverseConfig RunConfig::inverse_config() const
{
    InverseConfig c;
    c.box = box;
    c.region = region;
    c.sensors = sensors.build();
    c.quad_order = quad_order;
    c.lambda_rel = inversion.lambda_rel;
    c.starts = inversion.starts;
    c.max_iter = inversion.max_iter;
    c.tol = inversion.tol;
    return c;
}

RunConfig parse_config(const std::string& text, const std::string& source)
{
    RunConfig cfg;
    cfg.source = source;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(where(source, e.mark) + "YAML syntax error: " + e.msg);
    }
    MapReader top(root, "", cfg);
    top.scalar("seed", cfg.seed);
    {
        MapReader r(top.child("region"), "region", cfg);
        r.scalar("x1_min", cfg.region.x1_min);
        r.scalar("x1_max", cfg.region.x1_max);
        r.scalar("x2_min", cfg.region.x2_min);
        r.scalar("x2_max", cfg.region.x2_max);
        r.scalar("n1", cfg.region.n1);
        r.scalar("n2", cfg.region.n2);
        r.finish();
    }
    {
        MapReader r(top.child("sensors"), "sensors", cfg);
        read_sensor_grid(r, cfg.sensors);
        r.finish();
    }
    {
        MapReader r(top.child("crack"), "crack", cfg);
        std::array<double, 3> m = array_from(cfg.m);
        r.fixed("m", m);
        cfg.m = plane_from(m);
        MapReader b(r.child("box"), "crack.box", cfg);
        std::array<double, 3> lo = array_from(cfg.box.lo);
        std::array<double, 3> hi = array_from(cfg.box.hi);
        b.fixed("lo", lo);
        b.fixed("hi", hi);
        b.scalar("beta", cfg.box.beta_dist);
        cfg.box.lo = plane_from(lo);
        cfg.box.hi = plane_from(hi);
        b.finish();
        r.finish();
    }
    {
        MapReader r(top.child("slip"), "slip", cfg);
        r.scalar("family", cfg.slip.family);
        r.scalar("amplitude", cfg.slip.amplitude);
        r.fixed("center", cfg.slip.center);
        r.scalar("radius", cfg.slip.radius);
        r.scalar("path", cfg.slip.path);
        r.finish();
    }
    {
        MapReader r(top.child("quadrature"), "quadrature", cfg);
        r.scalar("order", cfg.quad_order);
        r.finish();
    }
    {
        MapReader r(top.child("forward"), "forward", cfg);
        ForwardConfig& f = cfg.forward;
        r.scalar("refine", f.refine);
        r.scalar("extra_order", f.extra_order);
        r.scalar("noise_rel", f.noise_rel);
        r.scalar("checks", f.checks);
        r.scalar("field_slice", f.field_slice);
        r.scalar("slice_x1_min", f.slice_x1_min);
        r.scalar("slice_x1_max", f.slice_x1_max);
        r.scalar("slice_x3_min", f.slice_x3_min);
        r.scalar("slice_x3_max", f.slice_x3_max);
        r.scalar("slice_n1", f.slice_n1);
        r.scalar("slice_n3", f.slice_n3);
        r.finish();
    }
    {
        MapReader r(top.child("stability"), "stability", cfg);
        StabilityConfig& s = cfg.stability;
        r.scalar("tau", s.tau);
        r.scalar("lambda_rel", s.lambda_rel);
        r.scalar("num_pairs", s.num_pairs);
        r.scalar("gram_grid", s.gram_grid);
        r.scalar("uniform_grid", s.uniform_grid);
        r.fixed("ray_direction", s.ray_direction);
        r.sequence("ray_t", s.ray_t);
        r.finish();
    }
    {
        MapReader r(top.child("inversion"), "inversion", cfg);
        InversionConfigSection& s = cfg.inversion;
        r.scalar("lambda_rel", s.lambda_rel);
        r.fixed("starts", s.starts);
        r.scalar("tol", s.tol);
        r.scalar("max_iter", s.max_iter);
        r.finish();
    }
    {
        MapReader r(top.child("jumps"), "jumps", cfg);
        const YAML::Node planes = r.child("planes");
        if (planes) {
            if (!planes.IsSequence()) {
                r.fail(planes.Mark(), "'jumps.planes' must be a list of [a, b, d] triples");
            }
            cfg.jumps.planes.clear();
            for (const auto& p : planes) {
                if (!p.IsSequence() || p.size() != 3) {
                    r.fail(p.Mark(), "'jumps.planes' entries must be [a, b, d] triples");
                }
                try {
                    cfg.jumps.planes.push_back(
                        {p[0].as<double>(), p[1].as<double>(), p[2].as<double>()});
                } catch (const YAML::Exception&) {
                    r.fail(p.Mark(), "'jumps.planes' entries must be numeric");
                }
            }
        }
        r.sequence("eps", cfg.jumps.eps);
        JumpQuadrature& q = cfg.jumps.quadrature;
        r.scalar("outer_cells", q.outer_cells);
        r.scalar("outer_order", q.outer_order);
        r.scalar("inner_cells", q.inner_cells);
        r.scalar("inner_order", q.inner_order);
        r.scalar("near_factor", q.near_factor);
        r.finish();
    }
    {
        MapReader r(top.child("counterexample"), "counterexample", cfg);
        CounterexampleSetup& s = cfg.counterexample.setup;
        r.scalar("cap_nodes_r", s.cap_nodes_r);
        r.scalar("annulus_nodes_r", s.annulus_nodes_r);
        r.scalar("nodes_theta", s.nodes_theta);
        MapReader sr(r.child("sensors"), "counterexample.sensors", cfg);
        read_sensor_grid(sr, cfg.counterexample.sensors);
        sr.finish();
        r.finish();
    }
    {
        MapReader r(top.child("output"), "output", cfg);
        r.scalar("directory", cfg.output_dir);
        r.finish();
    }
    top.finish();
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

namespace {

template <typename C>
void emit_flow(YAML::Emitter& e, const C& values)
{
    e << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : values) {
        e << v;
    }
    e << YAML::EndSeq;
}

void emit_sensor_grid(YAML::Emitter& e, const SensorGridConfig& s)
{
    e << YAML::Key << "x1_min" << YAML::Value << s.x1_min;
    e << YAML::Key << "x1_max" << YAML::Value << s.x1_max;
    e << YAML::Key << "x2_min" << YAML::Value << s.x2_min;
    e << YAML::Key << "x2_max" << YAML::Value << s.x2_max;
    e << YAML::Key << "n1" << YAML::Value << s.n1;
    e << YAML::Key << "n2" << YAML::Value << s.n2;
}

}  // namespace

std::string emit_config(const RunConfig& cfg)
{
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "seed" << YAML::Value << cfg.seed;

    e << YAML::Key << "region" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "x1_min" << YAML::Value << cfg.region.x1_min;
    e << YAML::Key << "x1_max" << YAML::Value << cfg.region.x1_max;
    e << YAML::Key << "x2_min" << YAML::Value << cfg.region.x2_min;
    e << YAML::Key << "x2_max" << YAML::Value << cfg.region.x2_max;
    e << YAML::Key << "n1" << YAML::Value << cfg.region.n1;
    e << YAML::Key << "n2" << YAML::Value << cfg.region.n2;
    e << YAML::EndMap;

    e << YAML::Key << "sensors" << YAML::Value << YAML::BeginMap;
    emit_sensor_grid(e, cfg.sensors);
    e << YAML::EndMap;

    e << YAML::Key << "crack" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "m" << YAML::Value;
    emit_flow(e, array_from(cfg.m));
    e << YAML::Key << "box" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "lo" << YAML::Value;
    emit_flow(e, array_from(cfg.box.lo));
    e << YAML::Key << "hi" << YAML::Value;
    emit_flow(e, array_from(cfg.box.hi));
    e << YAML::Key << "beta" << YAML::Value << cfg.box.beta_dist;
    e << YAML::EndMap << YAML::EndMap;

    e << YAML::Key << "slip" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "family" << YAML::Value << cfg.slip.family;
    e << YAML::Key << "amplitude" << YAML::Value << cfg.slip.amplitude;
    e << YAML::Key << "center" << YAML::Value;
    emit_flow(e, cfg.slip.center);
    e << YAML::Key << "radius" << YAML::Value << cfg.slip.radius;
    e << YAML::Key << "path" << YAML::Value << cfg.slip.path;
    e << YAML::EndMap;

    e << YAML::Key << "quadrature" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "order" << YAML::Value << cfg.quad_order;
    e << YAML::EndMap;

    const ForwardConfig& f = cfg.forward;
    e << YAML::Key << "forward" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "refine" << YAML::Value << f.refine;
    e << YAML::Key << "extra_order" << YAML::Value << f.extra_order;
    e << YAML::Key << "noise_rel" << YAML::Value << f.noise_rel;
    e << YAML::Key << "checks" << YAML::Value << f.checks;
    e << YAML::Key << "field_slice" << YAML::Value << f.field_slice;
    e << YAML::Key << "slice_x1_min" << YAML::Value << f.slice_x1_min;
    e << YAML::Key << "slice_x1_max" << YAML::Value << f.slice_x1_max;
    e << YAML::Key << "slice_x3_min" << YAML::Value << f.slice_x3_min;
    e << YAML::Key << "slice_x3_max" << YAML::Value << f.slice_x3_max;
    e << YAML::Key << "slice_n1" << YAML::Value << f.slice_n1;
    e << YAML::Key << "slice_n3" << YAML::Value << f.slice_n3;
    e << YAML::EndMap;

    const StabilityConfig& s = cfg.stability;
    e << YAML::Key << "stability" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "tau" << YAML::Value << s.tau;
    e << YAML::Key << "lambda_rel" << YAML::Value << s.lambda_rel;
    e << YAML::Key << "num_pairs" << YAML::Value << s.num_pairs;
    e << YAML::Key << "gram_grid" << YAML::Value << s.gram_grid;
    e << YAML::Key << "uniform_grid" << YAML::Value << s.uniform_grid;
    e << YAML::Key << "ray_direction" << YAML::Value;
    emit_flow(e, s.ray_direction);
    e << YAML::Key << "ray_t" << YAML::Value;
    emit_flow(e, s.ray_t);
    e << YAML::EndMap;

    const InversionConfigSection& inv = cfg.inversion;
    e << YAML::Key << "inversion" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "lambda_rel" << YAML::Value << inv.lambda_rel;
    e << YAML::Key << "starts" << YAML::Value;
    emit_flow(e, inv.starts);
    e << YAML::Key << "tol" << YAML::Value << inv.tol;
    e << YAML::Key << "max_iter" << YAML::Value << inv.max_iter;
    e << YAML::EndMap;

    const JumpsConfig& j = cfg.jumps;
    e << YAML::Key << "jumps" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "planes" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : j.planes) {
        emit_flow(e, array_from(p));
    }
    e << YAML::EndSeq;
    e << YAML::Key << "eps" << YAML::Value;
    emit_flow(e, j.eps);
    e << YAML::Key << "outer_cells" << YAML::Value << j.quadrature.outer_cells;
    e << YAML::Key << "outer_order" << YAML::Value << j.quadrature.outer_order;
    e << YAML::Key << "inner_cells" << YAML::Value << j.quadrature.inner_cells;
    e << YAML::Key << "inner_order" << YAML::Value << j.quadrature.inner_order;
    e << YAML::Key << "near_factor" << YAML::Value << j.quadrature.near_factor;
    e << YAML::EndMap;

    const CounterexampleConfig& c = cfg.counterexample;
    e << YAML::Key << "counterexample" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "cap_nodes_r" << YAML::Value << c.setup.cap_nodes_r;
    e << YAML::Key << "annulus_nodes_r" << YAML::Value << c.setup.annulus_nodes_r;
    e << YAML::Key << "nodes_theta" << YAML::Value << c.setup.nodes_theta;
    e << YAML::Key << "sensors" << YAML::Value << YAML::BeginMap;
    emit_sensor_grid(e, c.sensors);
    e << YAML::EndMap << YAML::EndMap;

    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "directory" << YAML::Value << cfg.output_dir;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace halfcrack
