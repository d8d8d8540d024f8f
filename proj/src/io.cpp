#include "stopwell/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace stopwell::io {

namespace pt = boost::property_tree;

namespace {

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw std::invalid_argument(key + ": not a number: '" + text + "'");
    return v;
}

ModelParams apply_model_keys(ModelParams p, const pt::ptree& section, const std::string& where) {
    for (const auto& [key, node] : section) {
        const std::string value = node.get_value<std::string>();
        const double v = parse_double(where + "." + key, value);
        if (key == "mu0") {
            p.mu0 = v;
        } else if (key == "mu1") {
            p.mu1 = v;
        } else if (key == "sigma") {
            p.sigma = v;
        } else if (key == "r") {
            p.r = v;
        } else if (key == "invest_cost" || key == "I") {
            p.invest_cost = v;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "' in [" + where + "]");
        }
    }
    return p;
}

}  // namespace

std::optional<std::string> Config::numeric(const std::string& key) const {
    const auto it = numerics.find(key);
    if (it == numerics.end()) return std::nullopt;
    return it->second;
}

Config parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    Config cfg;
    if (const auto model = tree.get_child_optional(pt::ptree::path_type("model", '\0'))) {
        cfg.model = apply_model_keys(cfg.model, *model, "model");
    }
    validate(cfg.model);
    // The INI reader drops empty sections, so take section names from the text.
    std::vector<std::string> sections;
    {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            const auto a = line.find_first_not_of(" \t");
            const auto b = line.find_last_not_of(" \t\r");
            if (a != std::string::npos && line[a] == '[' && line[b] == ']') sections.push_back(line.substr(a + 1, b - a - 1));
        }
    }
    const pt::ptree empty;
    for (const auto& section : sections) {
        const auto child = tree.get_child_optional(pt::ptree::path_type(section, '\0'));
        const pt::ptree& body = child ? *child : empty;
        if (section == "model") continue;
        if (section == "numerics") {
            for (const auto& [key, node] : body) cfg.numerics[key] = node.get_value<std::string>();
        } else if (section.rfind("sweep.", 0) == 0 && section.size() > 6) {
            SweepSet set{section.substr(6), apply_model_keys(cfg.model, body, section)};
            validate(set.params);
            cfg.sweeps.push_back(std::move(set));
        } else {
            throw std::invalid_argument("config: unknown section [" + section + "]");
        }
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<SweepSet> default_sweep() {
    auto set = [](const char* name, double mu0, double sigma) {
        ModelParams p;
        p.mu0 = mu0;
        p.sigma = sigma;
        return SweepSet{name, p};
    };
    return {set("reference", 0.01, 0.2), set("low_vol", 0.01, 0.1), set("high_vol", 0.01, 0.3),
            set("wide_gap", -0.03, 0.2)};
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::uint64_t seed, const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), ncols_(columns.size()) {
    if (!out_) throw IoError("cannot write " + path.string());
    out_ << "# stopwell " << STOPWELL_VERSION << " seed=" << seed << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != ncols_) throw std::logic_error("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw IoError("error while writing " + path_.string());
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::invalid_argument("csv: no column '" + name + "'");
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line);
        if (t.columns.empty()) {
            t.columns = cells;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(path.string() + ":" + std::to_string(lineno), c));
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw std::invalid_argument(path.string() + ": no header row");
    return t;
}

nlohmann::json params_to_json(const ModelParams& p) {
    return {{"mu0", p.mu0}, {"mu1", p.mu1}, {"sigma", p.sigma}, {"r", p.r}, {"invest_cost", p.invest_cost}};
}

ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.mu0 = j.at("mu0").get<double>();
    p.mu1 = j.at("mu1").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.r = j.at("r").get<double>();
    p.invest_cost = j.at("invest_cost").get<double>();
    return p;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json timings = nlohmann::json::array();
    for (const auto& [stage, secs] : m.timings_s) timings.push_back({{"stage", stage}, {"seconds", secs}});
    return {{"version", m.version},     {"subcommand", m.subcommand}, {"params", params_to_json(m.params)},
            {"seed", m.seed},           {"flags", m.flags},           {"results", m.results},
            {"wall_time_s", m.wall_time_s}, {"timings", timings}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.version = j.at("version").get<std::string>();
        m.subcommand = j.at("subcommand").get<std::string>();
        m.params = params_from_json(j.at("params"));
        m.seed = j.at("seed").get<std::uint64_t>();
        m.flags = j.value("flags", nlohmann::json::object());
        m.results = j.value("results", nlohmann::json::object());
        m.wall_time_s = j.value("wall_time_s", 0.0);
        for (const auto& t : j.value("timings", nlohmann::json::array())) {
            m.timings_s.emplace_back(t.at("stage").get<std::string>(), t.at("seconds").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("manifest: ") + e.what());
    }
    return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    write_text(path, manifest_to_json(m).dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("manifest " + path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.close();
    if (out.fail()) throw IoError("error while writing " + path.string());
}

}  // namespace stopwell::io
