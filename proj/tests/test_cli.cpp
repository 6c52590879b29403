#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "halfcrack/cli.hpp"
#include "halfcrack/csv.hpp"

using namespace halfcrack;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig =
    "region:\n"
    "  n1: 7\n"
    "  n2: 7\n"
    "sensors:\n"
    "  n1: 9\n"
    "  n2: 9\n"
    "crack:\n"
    "  m: [0.15, -0.1, -1.6]\n"
    "forward:\n"
    "  refine: 2\n"
    "  extra_order: 2\n"
    "inversion:\n"
    "  starts: [1, 1, 2]\n"
    "stability:\n"
    "  num_pairs: 20\n"
    "  gram_grid: 2\n"
    "  uniform_grid: 2\n"
    "  ray_t: [0.02, 0.1]\n"
    "counterexample:\n"
    "  cap_nodes_r: 8\n"
    "  annulus_nodes_r: 8\n"
    "  nodes_theta: 32\n"
    "  sensors:\n"
    "    n1: 5\n"
    "    n2: 5\n";

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::path(::testing::TempDir()) /
               ("halfcrack_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write("small.yaml", kSmallConfig);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path(name)) << text;
    }

    int run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "halfcrack");
        std::vector<const char*> argv;
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        out_.str("");
        err_.str("");
        return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    static std::string slurp(const std::string& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, ForwardThenInvertRecoversPlane)
{
    ASSERT_EQ(run({"--config", path("small.yaml"), "--out", path("fw"), "forward"}), kExitOk)
        << err_.str();
    for (const char* f : {"boundary_data.csv", "slip.csv", "checks.yaml", "resolved_config.yaml"}) {
        EXPECT_TRUE(fs::exists(path("fw/") + f)) << f;
    }
    ASSERT_EQ(run({"--config", path("small.yaml"), "--out", path("inv"), "invert", "--data",
                   path("fw/boundary_data.csv")}),
              kExitOk)
        << err_.str();
    const std::string result = slurp(path("inv/result.yaml"));
    EXPECT_NE(result.find("converged: true"), std::string::npos) << result;
    const CsvTable starts = read_csv(path("inv/starts.csv"));
    EXPECT_EQ(starts.rows.size(), 2u);
}

TEST_F(CliTest, OutputsAreDeterministicAndReproducibleFromResolvedConfig)
{
    for (const char* sub : {"forward", "stability", "counterexample"}) {
        const std::string a = path(std::string(sub) + "_a");
        const std::string b = path(std::string(sub) + "_b");
        ASSERT_EQ(run({"--config", path("small.yaml"), "--seed", "3", "--out", a, sub}), kExitOk)
            << sub << ": " << err_.str();
        ASSERT_EQ(run({"--config", a + "/resolved_config.yaml", "--out", b, sub}), kExitOk)
            << sub << ": " << err_.str();
        for (const auto& entry : fs::directory_iterator(a)) {
            const std::string name = entry.path().filename().string();
            if (name == "resolved_config.yaml") {
                continue;
            }
            EXPECT_EQ(slurp(entry.path().string()), slurp(b + "/" + name)) << sub << "/" << name;
        }
    }
}

TEST_F(CliTest, JumpsWritesAllKinds)
{
    write("jumps.yaml",
          "jumps:\n  planes: [[0.0, 0.0, -2.0]]\n  eps: [0.08, 0.04, 0.02]\n"
          "  outer_cells: 6\n  inner_cells: 3\n");
    ASSERT_EQ(run({"--config", path("jumps.yaml"), "--out", path("j"), "jumps"}), kExitOk)
        << err_.str();
    const CsvTable t = read_csv(path("j/jumps.csv"));
    ASSERT_EQ(t.rows.size(), 8u);
    const int rel = t.column("rel_err");
    ASSERT_GE(rel, 0);
    for (const auto& row : t.rows) {
        EXPECT_LE(row[rel], 1e-2);
    }
}

TEST_F(CliTest, ConfigErrorsExitWithTwo)
{
    write("bad.yaml", "region:\n  n1: 9\n  bogus: 1\n");
    EXPECT_EQ(run({"--config", path("bad.yaml"), "--out", path("x"), "forward"}), kExitConfig);
    EXPECT_NE(err_.str().find("bad.yaml:3:"), std::string::npos) << err_.str();

    write("surface.yaml", "crack:\n  m: [0.0, 0.0, 0.2]\n");
    EXPECT_EQ(run({"--config", path("surface.yaml"), "--out", path("x"), "forward"}), kExitConfig);
    EXPECT_NE(err_.str().find("surface.yaml:2:"), std::string::npos) << err_.str();

    EXPECT_EQ(run({}), kExitConfig);
    EXPECT_EQ(run({"invert"}), kExitConfig);
    EXPECT_EQ(run({"forward", "--unknown"}), kExitConfig);
}

TEST_F(CliTest, IoErrorsExitWithFour)
{
    EXPECT_EQ(run({"--config", path("missing.yaml"), "forward"}), kExitIo);
    EXPECT_EQ(run({"--config", path("small.yaml"), "--out", path("i"), "invert", "--data",
                   path("missing.csv")}),
              kExitIo);
}

TEST_F(CliTest, MismatchedDataIsRejected)
{
    write("short.csv", "x1,x2,value\n0,0,1\n");
    EXPECT_EQ(run({"--config", path("small.yaml"), "--out", path("i"), "invert", "--data",
                   path("short.csv")}),
              kExitConfig);
}

TEST_F(CliTest, InstalledBinaryReportsExitCodes)
{
    const std::string bin = HALFCRACK_CLI_BINARY;
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status(bin + " --help"), 0);
    EXPECT_EQ(status(bin), 2);
    EXPECT_EQ(status(bin + " --config " + path("missing.yaml") + " forward"), 4);
    EXPECT_EQ(status(bin + " --config " + path("small.yaml") + " --out " + path("c") +
                     " counterexample"),
              0);
}
