// Configuration files, CSV output and run manifests.
#pragma once

#include "stopwell/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stopwell::io {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A named parameter set from a `[sweep.<name>]` section.
struct SweepSet {
    std::string name;
    ModelParams params;
};

/// Flat INI-style configuration:
///
///   [model]          mu0, mu1, sigma, r, invest_cost (alias I)
///   [numerics]       free-form key = value, read by the subcommands
///   [sweep.<name>]   model keys; unset keys inherit from [model]
///
/// Unknown model keys are rejected so typos do not silently fall back to defaults.
struct Config {
    ModelParams model;
    std::map<std::string, std::string> numerics;
    std::vector<SweepSet> sweeps;  // in file order

    std::optional<std::string> numeric(const std::string& key) const;
};

Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text);

/// Four default sets sharing r = 0.05, mu1 = 0.03, I = 100 and spanning signal
/// to noise (mu1 - mu0) / sigma from 0.067 to 0.3:
///   reference  mu0 =  0.01, sigma = 0.2
///   low_vol    mu0 =  0.01, sigma = 0.1
///   high_vol   mu0 =  0.01, sigma = 0.3
///   wide_gap   mu0 = -0.03, sigma = 0.2
std::vector<SweepSet> default_sweep();

/// printf %.17g; round-trips every finite double.
std::string format_number(double v);

/// CSV file with a `# stopwell <version> seed=<seed>` comment line, a header
/// row and numeric rows. Throws IoError when the file cannot be written.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::uint64_t seed, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t ncols_;
};

/// Numeric CSV as written by CsvWriter: '#' lines skipped, first row is the header.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Values of one column; throws std::invalid_argument if absent.
    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

struct RunManifest {
    std::string version = STOPWELL_VERSION;
    std::string subcommand;
    ModelParams params;
    std::uint64_t seed = 0;
    nlohmann::json flags = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();  // iterations, convergence, etc.
    double wall_time_s = 0.0;
    std::vector<std::pair<std::string, double>> timings_s;
};

nlohmann::json params_to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// Creates `dir` (and parents); throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

/// Writes a text file; throws IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stopwell::io
