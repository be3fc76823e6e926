#include "ftlab/errors.hpp"
#include "ftlab/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace ftlab {

std::string to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        default: return "inconclusive";
    }
}

bool ExperimentReport::ok() const {
    for (const Criterion& c : criteria)
        if (c.status == Status::Fail) return false;
    return true;
}

void ExperimentReport::add(const std::string& name, bool pass, const std::string& detail, json measured) {
    criteria.push_back({name, pass ? Status::Pass : Status::Fail, detail, std::move(measured)});
}

void ExperimentReport::add_inconclusive(const std::string& name, const std::string& detail, json measured) {
    criteria.push_back({name, Status::Inconclusive, detail, std::move(measured)});
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const int version = j.value("schema_version", kSchemaVersion);
    if (version != kSchemaVersion) {
        std::ostringstream os;
        os << "unsupported schema_version " << version << " (expected " << kSchemaVersion << ")";
        throw ConfigError(os.str());
    }
    if (!j.contains("experiment")) throw ConfigError("config needs an \"experiment\" field");
    ExperimentConfig c = default_config(j.at("experiment").get<std::string>());
    try {
        c.system = j.value("system", c.system);
        c.nu = j.value("nu", c.nu);
        c.delta = j.value("delta", c.delta);
        c.epsilon = j.value("epsilon", c.epsilon);
        c.T = j.value("T", c.T);
        c.R = j.value("R", c.R);
        c.seed = j.value("seed", c.seed);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.jobs = j.value("jobs", c.jobs);
        if (j.contains("data")) c.data.update(j.at("data"));
        if (j.contains("params")) c.params.update(j.at("params"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!(c.T > 0.0) || !(c.R > 0.0)) throw ConfigError("T and R must be positive");
    if (!(c.nu > 0.0)) throw ConfigError("nu must be positive");
    if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    return json{{"schema_version", kSchemaVersion},
                {"experiment", c.experiment},
                {"system", c.system},
                {"nu", c.nu},
                {"delta", c.delta},
                {"epsilon", c.epsilon},
                {"T", c.T},
                {"R", c.R},
                {"seed", c.seed},
                {"data", c.data},
                {"params", c.params},
                {"output_dir", c.output_dir}};
}

json report_to_json(const ExperimentReport& r) {
    json crit = json::array();
    for (const Criterion& c : r.criteria)
        crit.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail},
                        {"measured", c.measured}});
    json files = json::array();
    for (const auto& [name, body] : r.csv) files.push_back(name);
    return json{{"config", config_to_json(r.config)},
                {"criteria", crit},
                {"measurements", r.measurements},
                {"violations", r.violations},
                {"artifacts", files},
                {"ok", r.ok()}};
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << body;
}

}  // namespace

std::string write_run_directory(const ExperimentReport& r, const std::string& out_root) {
    namespace fs = std::filesystem;
    std::ostringstream name;
    name << r.config.experiment << '-' << r.config.system << "-seed" << r.config.seed;
    const fs::path dir = fs::path(out_root) / name.str();
    fs::create_directories(dir);
    write_file(dir / "config.json", config_to_json(r.config).dump(2) + "\n");
    write_file(dir / "report.json", report_to_json(r).dump(2) + "\n");
    write_file(dir / "timing.json", json{{"runtime_seconds", r.runtime_seconds}}.dump(2) + "\n");
    for (const auto& [file, body] : r.csv) write_file(dir / file, body);
    return dir.string();
}

}  // namespace ftlab
