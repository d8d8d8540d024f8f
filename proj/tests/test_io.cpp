#include "stopwell/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace stopwell;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
    const fs::path d = fs::path(STOPWELL_TEST_TMP) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Config, ModelNumericsAndSweeps) {
    const auto cfg = io::parse_config(
        "[model]\nsigma = 0.25\nI = 50\n[numerics]\nm = 51\nsamples = 20000\n[sweep.base]\n[sweep.noisy]\nsigma = 0.4\n");
    EXPECT_DOUBLE_EQ(cfg.model.sigma, 0.25);
    EXPECT_DOUBLE_EQ(cfg.model.invest_cost, 50.0);
    EXPECT_EQ(cfg.numeric("m").value(), "51");
    EXPECT_FALSE(cfg.numeric("tol").has_value());
    ASSERT_EQ(cfg.sweeps.size(), 2u);
    EXPECT_EQ(cfg.sweeps[0].name, "base");
    EXPECT_DOUBLE_EQ(cfg.sweeps[0].params.sigma, 0.25);
    EXPECT_DOUBLE_EQ(cfg.sweeps[1].params.sigma, 0.4);
    EXPECT_DOUBLE_EQ(cfg.sweeps[1].params.invest_cost, 50.0);
}

TEST(Config, Errors) {
    EXPECT_THROW(io::parse_config("[model]\nsigma = abc\n"), std::invalid_argument);
    EXPECT_THROW(io::parse_config("[model]\nvol = 0.2\n"), std::invalid_argument);
    EXPECT_THROW(io::parse_config("[other]\na = 1\n"), std::invalid_argument);
    EXPECT_THROW(io::parse_config("[model]\nsigma = -1\n"), ValidationError);
    EXPECT_THROW(io::parse_config("[model\n"), std::invalid_argument);
    EXPECT_THROW(io::load_config("/nonexistent/x.ini"), io::IoError);
}

TEST(Config, DefaultSweepValid) {
    const auto sets = io::default_sweep();
    EXPECT_EQ(sets.size(), 4u);
    for (const auto& s : sets) EXPECT_NO_THROW(validate(s.params));
}

TEST(Csv, RoundTripExact) {
    const auto d = tmp_dir("csv");
    io::CsvWriter w(d / "a.csv", 77, {"x", "y"});
    w.row({0.1, 1.0 / 3.0});
    w.row({1e-300, std::nan("")});
    EXPECT_THROW(w.row({1.0}), std::logic_error);
    w.close();
    const auto t = io::read_csv(d / "a.csv");
    ASSERT_EQ(t.columns, (std::vector<std::string>{"x", "y"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][1], 1.0 / 3.0);
    EXPECT_EQ(t.rows[1][0], 1e-300);
    EXPECT_TRUE(std::isnan(t.rows[1][1]));
    EXPECT_EQ(t.column("x"), (std::vector<double>{0.1, 1e-300}));
    EXPECT_THROW(t.column("z"), std::invalid_argument);
    std::ifstream in(d / "a.csv");
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, std::string("# stopwell ") + STOPWELL_VERSION + " seed=77");
}

TEST(Csv, Errors) {
    const auto d = tmp_dir("csv_err");
    io::write_text(d / "bad.csv", "a,b\n1,2\n3\n");
    EXPECT_THROW(io::read_csv(d / "bad.csv"), std::invalid_argument);
    io::write_text(d / "nan.csv", "a\nfoo\n");
    EXPECT_THROW(io::read_csv(d / "nan.csv"), std::invalid_argument);
    EXPECT_THROW(io::read_csv(d / "missing.csv"), io::IoError);
    EXPECT_THROW(io::CsvWriter(d / "no" / "dir.csv", 1, {"a"}), io::IoError);
}

TEST(Manifest, RoundTrip) {
    const auto d = tmp_dir("manifest");
    io::RunManifest m;
    m.subcommand = "boundary";
    m.params.sigma = 0.3;
    m.seed = 123456789012345ULL;
    m.flags = {{"m", 11}, {"pi", {0.25, 0.5}}};
    m.results = {{"iterations", 4}};
    m.wall_time_s = 1.5;
    m.timings_s = {{"fixed_point", 1.25}};
    io::write_manifest(d / "m.json", m);
    const auto r = io::read_manifest(d / "m.json");
    EXPECT_EQ(r.subcommand, m.subcommand);
    EXPECT_EQ(r.params, m.params);
    EXPECT_EQ(r.seed, m.seed);
    EXPECT_EQ(r.flags, m.flags);
    EXPECT_EQ(r.results, m.results);
    EXPECT_EQ(r.timings_s, m.timings_s);
    io::write_text(d / "bad.json", "{not json");
    EXPECT_THROW(io::read_manifest(d / "bad.json"), std::invalid_argument);
    io::write_text(d / "partial.json", "{\"version\": \"0\"}");
    EXPECT_THROW(io::read_manifest(d / "partial.json"), std::invalid_argument);
}

TEST(Format, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 8.7015621187164243, -2.5e-17}) EXPECT_EQ(std::stod(io::format_number(v)), v);
}
