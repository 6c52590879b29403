#pragma once

// YAML run configuration for the command-line front end.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "halfcrack/counterexample.hpp"
#include "halfcrack/forward.hpp"
#include "halfcrack/geometry.hpp"
#include "halfcrack/inversion.hpp"
#include "halfcrack/jumps.hpp"
#include "halfcrack/slip_grid.hpp"
#include "halfcrack/stability.hpp"

namespace halfcrack {

struct SensorGridConfig {
    double x1_min = -3.0;
    double x1_max = 3.0;
    double x2_min = -3.0;
    double x2_max = 3.0;
    int n1 = 15;
    int n2 = 15;

    SensorSet build() const { return SensorSet::grid(x1_min, x1_max, x2_min, x2_max, n1, n2); }
};

struct SlipConfig {
    std::string family = "tent";  ///< tent | bump | nodal
    double amplitude = 1.0;
    std::array<double, 2> center{0.0, 0.0};  ///< bump only
    double radius = 0.9;  ///< bump only
    std::string path;  ///< nodal only: CSV with columns x1,x2,value at the grid nodes
};

struct ForwardConfig {
    int refine = 1;  ///< slip grid refinement for the data
    int extra_order = 0;  ///< added to the quadrature order for the data
    double noise_rel = 0.0;
    bool checks = true;
    bool field_slice = false;  ///< u on the plane x2 = 0
    double slice_x1_min = -3.0;
    double slice_x1_max = 3.0;
    double slice_x3_min = -3.0;
    double slice_x3_max = -0.05;
    int slice_n1 = 41;
    int slice_n3 = 41;
};

struct StabilityConfig {
    double tau = kDefaultTau;
    double lambda_rel = kDefaultLambdaRel;
    int num_pairs = 200;
    int gram_grid = 5;  ///< nodes per axis of the full-rank scan over B
    int uniform_grid = 3;  ///< nodes per axis of the uniform-constant scan
    std::array<double, 3> ray_direction{1.0, 1.0, 1.0};
    std::vector<double> ray_t{0.02, 0.05, 0.1, 0.15, 0.2};
};

struct InversionConfigSection {
    double lambda_rel = 1e-10;
    std::array<int, 3> starts{2, 2, 2};
    double tol = 1e-10;
    int max_iter = 60;
};

struct JumpsConfig {
    std::vector<PlaneParams> planes{PlaneParams{0.0, 0.0, -2.0}};
    std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
    JumpQuadrature quadrature;
};

struct CounterexampleConfig {
    CounterexampleSetup setup;
    SensorGridConfig sensors{-4.0, 4.0, -4.0, 4.0, 21, 21};
};

struct RunConfig {
    RegionR region;
    SensorGridConfig sensors;
    PlaneParams m{0.2, -0.1, -1.5};
    ParamBox box;
    SlipConfig slip;
    int quad_order = kDefaultQuadOrder;
    std::uint64_t seed = 0;
    ForwardConfig forward;
    StabilityConfig stability;
    InversionConfigSection inversion;
    JumpsConfig jumps;
    CounterexampleConfig counterexample;
    std::string output_dir = "out";

    /// Source line of each key that was read, "section.key" -> 1-based line.
    std::map<std::string, int> lines;
    std::string source = "<defaults>";

    /// Slip on the region grid. Throws IoError if a nodal file cannot be read.
    SlipGrid build_slip() const;
    InverseConfig inverse_config() const;
};

/// Parses YAML text. Unknown keys, wrong types and invalid values throw
/// ConfigError with "source:line:" prefixes.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Reads and parses a file. Throws IoError when it cannot be read.
RunConfig load_config(const std::string& path);

/// Fully resolved configuration as YAML; parse_config of the result gives
/// back the same settings.
std::string emit_config(const RunConfig& cfg);

}  // namespace halfcrack
