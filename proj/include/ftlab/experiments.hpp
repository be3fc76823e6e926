#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ftlab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
    std::string experiment;
    std::string system;
    double nu = 1e-3;
    double delta = 0.01;
    double epsilon = 0.0;  // 0: no smallness check on U at initialisation
    double T = 0.5;
    double R = 2.0;
    std::uint64_t seed = 1;
    json data = json::object();    // generator spec
    json params = json::object();  // experiment specific knobs
    std::string output_dir = "runs";
    int jobs = 1;
};

enum class Status { Pass, Fail, Inconclusive };
std::string to_string(Status s);

struct Criterion {
    std::string name;
    Status status = Status::Inconclusive;
    std::string detail;
    json measured = json::object();
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<Criterion> criteria;
    json measurements = json::object();
    json violations = json::array();
    std::map<std::string, std::string> csv;
    double runtime_seconds = 0.0;

    bool ok() const;  // every criterion passes or is inconclusive
    void add(const std::string& name, bool pass, const std::string& detail, json measured = json::object());
    void add_inconclusive(const std::string& name, const std::string& detail, json measured = json::object());
};

const std::vector<std::string>& experiment_names();
// Default system and parameters for an experiment (the values the acceptance run uses).
ExperimentConfig default_config(const std::string& experiment);

ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentReport run_hypotheses(const ExperimentConfig& c);
ExperimentReport run_riemann_oracle(const ExperimentConfig& c);
ExperimentReport run_interaction_suite(const ExperimentConfig& c);
ExperimentReport run_weight_suite(const ExperimentConfig& c);
ExperimentReport run_shock_contraction(const ExperimentConfig& c);
ExperimentReport run_rarefaction_contraction(const ExperimentConfig& c);
ExperimentReport run_trapezoid_stability(const ExperimentConfig& c);
ExperimentReport run_decay_rate(const ExperimentConfig& c);
ExperimentReport run_weak_bv_stability(const ExperimentConfig& c);
ExperimentReport run_sampling_chain(const ExperimentConfig& c);
ExperimentReport run_mollification_rates(const ExperimentConfig& c);
ExperimentReport run_commutator_decay(const ExperimentConfig& c);
ExperimentReport run_shock_asymptotics(const ExperimentConfig& c);

// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// JSON round trip and run-directory output.
ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);
json report_to_json(const ExperimentReport& r);
// Writes config.json, report.json, timing.json and CSV artifacts; returns the directory.
std::string write_run_directory(const ExperimentReport& r, const std::string& out_root);

}  // namespace ftlab
