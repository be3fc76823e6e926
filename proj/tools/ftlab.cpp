#include "ftlab/errors.hpp"
#include "ftlab/experiments.hpp"
#include "ftlab/system.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

void print_report(const ftlab::ExperimentReport& rep, const std::string& dir) {
    for (const ftlab::Criterion& c : rep.criteria) {
        std::string tag = ftlab::to_string(c.status);
        for (char& ch : tag) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        std::cout << tag << "  " << c.name << ": " << c.detail << '\n';
    }
    std::cout << "runtime " << rep.runtime_seconds << " s";
    if (!dir.empty()) std::cout << ", written to " << dir;
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ftlab: front tracking and relative entropy experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<std::uint64_t> seed;
    std::optional<double> nu;
    std::optional<int> jobs;
    std::string out;
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--nu", nu, "override the front tracking parameter nu");
    app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output root for run directories");

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

    app.add_subcommand("list-systems", "list builtin flux systems");

    std::string system;
    auto* check = app.add_subcommand("check", "hypothesis report for a system");
    check->add_option("system", system, "system name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-systems")) {
            for (const ftlab::FluxSystem& s : ftlab::builtin_systems())
                std::cout << s.name << "  " << s.description << '\n';
            return 0;
        }
        ftlab::ExperimentConfig cfg;
        if (app.got_subcommand("run")) {
            std::ifstream f(config_path);
            ftlab::json j;
            try {
                j = ftlab::json::parse(f);
            } catch (const ftlab::json::exception& e) {
                throw ftlab::ConfigError(std::string("cannot parse ") + config_path + ": " + e.what());
            }
            cfg = ftlab::config_from_json(j);
        } else {
            cfg = ftlab::default_config("hypotheses");
            if (system != cfg.system) cfg.params.erase("sj_expected");
            ftlab::system_by_name(system);
            cfg.system = system;
        }
        if (seed) cfg.seed = *seed;
        if (nu) {
            if (!(*nu > 0.0)) throw ftlab::ConfigError("--nu must be positive");
            cfg.nu = *nu;
        }
        if (jobs) cfg.jobs = *jobs;
        if (!out.empty()) cfg.output_dir = out;
        const ftlab::ExperimentReport rep = ftlab::run_experiment(cfg);
        const std::string dir = ftlab::write_run_directory(rep, cfg.output_dir);
        print_report(rep, dir);
        return rep.ok() ? 0 : 1;
    } catch (const ftlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
