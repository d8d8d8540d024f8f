#include "stopwell/cli.hpp"
#include "stopwell/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stopwell;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "stopwell");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    testing::internal::CaptureStdout();
    testing::internal::CaptureStderr();
    const int rc = cli::run(static_cast<int>(argv.size()), argv.data());
    testing::internal::GetCapturedStdout();
    testing::internal::GetCapturedStderr();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path tmp_dir(const std::string& name) {
    const fs::path d = fs::path(STOPWELL_TEST_TMP) / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST(Cli, ThresholdsWritesCsvAndManifest) {
    const auto d = tmp_dir("cli_thr");
    ASSERT_EQ(run_cli({"--out", d.string(), "thresholds", "--m", "5"}), cli::kExitOk);
    const auto t = io::read_csv(d / "thresholds.csv");
    ASSERT_EQ(t.rows.size(), 5u);
    EXPECT_NEAR(t.rows.front()[1], 8.70156, 1e-5);
    EXPECT_NEAR(t.rows.back()[1], 7.70156, 1e-5);
    const auto m = io::read_manifest(d / "manifest.json");
    EXPECT_EQ(m.subcommand, "thresholds");
    EXPECT_EQ(m.flags.at("m"), 5);
}

TEST(Cli, ReplayIsByteIdentical) {
    const auto a = tmp_dir("cli_rep_a");
    const auto b = tmp_dir("cli_rep_b");
    ASSERT_EQ(run_cli({"--out", a.string(), "--seed", "11", "--sigma", "0.25", "boundary", "--m", "6", "--samples",
                       "10000"}),
              cli::kExitOk);
    ASSERT_EQ(run_cli({"--out", b.string(), "replay", (a / "manifest.json").string()}), cli::kExitOk);
    EXPECT_EQ(slurp(a / "boundary.csv"), slurp(b / "boundary.csv"));
    const auto m = io::read_manifest(b / "manifest.json");
    EXPECT_EQ(m.seed, 11u);
    EXPECT_DOUBLE_EQ(m.params.sigma, 0.25);
}

TEST(Cli, ValueFromBoundaryCsv) {
    const auto d = tmp_dir("cli_val");
    ASSERT_EQ(run_cli({"--out", d.string(), "boundary", "--m", "6", "--samples", "10000"}), cli::kExitOk);
    ASSERT_EQ(run_cli({"--out", d.string(), "value", "--boundary-csv", (d / "boundary.csv").string(), "--x", "5,9",
                       "--pi", "1", "--value-samples", "20000"}),
              cli::kExitOk);
    const auto t = io::read_csv(d / "value.csv");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_NEAR(t.rows[0][2], 159.054, 4 * t.rows[0][3]);
}

TEST(Cli, ConfigNumericsApplyUnlessFlagGiven) {
    const auto d = tmp_dir("cli_cfg");
    fs::create_directories(d);
    io::write_text(d / "c.ini", "[model]\nsigma = 0.3\n[numerics]\nm = 7\n");
    ASSERT_EQ(run_cli({"--out", d.string(), "--config", (d / "c.ini").string(), "thresholds"}), cli::kExitOk);
    auto m = io::read_manifest(d / "manifest.json");
    EXPECT_EQ(m.flags.at("m"), 7);
    EXPECT_DOUBLE_EQ(m.params.sigma, 0.3);
    ASSERT_EQ(run_cli({"--out", d.string(), "--config", (d / "c.ini").string(), "--sigma", "0.2", "thresholds", "--m",
                       "9"}),
              cli::kExitOk);
    m = io::read_manifest(d / "manifest.json");
    EXPECT_EQ(m.flags.at("m"), 9);
    EXPECT_DOUBLE_EQ(m.params.sigma, 0.2);
}

TEST(Cli, OracleAndVoiOutputs) {
    const auto d = tmp_dir("cli_or");
    ASSERT_EQ(run_cli({"--out", d.string(), "oracle", "--oracle-nx", "81", "--oracle-npi", "21"}), cli::kExitOk);
    EXPECT_EQ(io::read_csv(d / "oracle_surface.csv").rows.size(), 81u * 21u);
    EXPECT_EQ(io::read_csv(d / "oracle_boundary.csv").rows.size(), 21u);
    ASSERT_EQ(run_cli({"--out", d.string(), "voi", "--m", "6", "--samples", "10000", "--nx", "5", "--pi", "0.5",
                       "--value-samples", "10000"}),
              cli::kExitOk);
    EXPECT_EQ(io::read_csv(d / "voi.csv").columns,
              (std::vector<std::string>{"x", "pi", "v_bar", "v", "delta", "delta_se"}));
}

TEST(Cli, FiguresFromSweepFileReplays) {
    const auto a = tmp_dir("cli_fig_a");
    const auto b = tmp_dir("cli_fig_b");
    fs::create_directories(a);
    io::write_text(a / "s.ini", "[sweep.one]\n[sweep.two]\nsigma = 0.3\n");
    ASSERT_EQ(run_cli({"--out", a.string(), "figures", "--sweep", (a / "s.ini").string(), "--m", "6", "--samples",
                       "10000", "--nx", "4", "--value-samples", "5000"}),
              cli::kExitOk);
    ASSERT_EQ(run_cli({"--out", b.string(), "replay", (a / "manifest.json").string()}), cli::kExitOk);
    for (const char* f : {"boundary_one.csv", "boundary_two.csv", "voi_one.csv", "voi_two.csv", "figures.gp"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
}

TEST(Cli, VerifySubset) {
    const auto d = tmp_dir("cli_ver");
    EXPECT_EQ(run_cli({"--out", d.string(), "verify", "--quick", "--only", "1"}), cli::kExitOk);
    EXPECT_NE(slurp(d / "verify.txt").find("PASS [1]"), std::string::npos);
    EXPECT_EQ(run_cli({"--out", d.string(), "verify", "--only", "11"}), cli::kExitInvalid);
}

TEST(Cli, ExitCodes) {
    const auto d = tmp_dir("cli_exit");
    EXPECT_EQ(run_cli({"--help"}), cli::kExitOk);
    EXPECT_EQ(run_cli({}), cli::kExitInvalid);
    EXPECT_EQ(run_cli({"--out", d.string(), "--sigma", "-1", "thresholds"}), cli::kExitInvalid);
    EXPECT_EQ(run_cli({"--out", d.string(), "--mu0", "0.05", "thresholds"}), cli::kExitInvalid);
    EXPECT_EQ(run_cli({"--out", d.string(), "boundary", "--init", "middle"}), cli::kExitInvalid);
    EXPECT_EQ(run_cli({"--out", d.string(), "--config", "/nonexistent.ini", "thresholds"}), cli::kExitIo);
    EXPECT_EQ(run_cli({"--out", "/proc/stopwell", "thresholds"}), cli::kExitIo);
    EXPECT_EQ(run_cli({"--out", d.string(), "replay", "/nonexistent.json"}), cli::kExitIo);
    EXPECT_EQ(run_cli({"--out", d.string(), "boundary", "--m", "6", "--samples", "10000", "--tol", "1e-300",
                       "--max-iter", "1", "--init", "upper"}),
              cli::kExitNumerical);
    EXPECT_EQ(run_cli({"--out", d.string(), "oracle", "--oracle-nx", "41", "--oracle-npi", "11", "--max-sweeps", "2"}),
              cli::kExitNumerical);
}
