#include "ftlab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <thread>

using namespace ftlab;

namespace {

struct Item {
    int id;
    const char* experiment;
    const char* title;
    double time_limit;  // seconds, 0 = none
};

const Item kItems[] = {
    {1, "hypotheses", "hypothesis checker on the quadratic flux", 5.0},
    {2, "riemann_oracle", "front tracking reproduces the Riemann fan", 30.0},
    {3, "interaction_suite", "Glimm functional decreases at interactions", 120.0},
    {4, "weight_suite", "weight brackets, decay and global bound", 0.0},
    {5, "shock_contraction", "shifted shock a-contraction", 0.0},
    {6, "rarefaction_contraction", "weighted rarefaction contraction", 0.0},
    {7, "weak_bv_stability", "weak-BV stability exponents", 600.0},
    {8, "decay_rate", "t^{s/2} decay for fbm data", 0.0},
    {9, "mollification_rates", "mollification TV, L2 and fractional TV rates", 0.0},
    {10, "commutator_decay", "commutator decay for Weierstrass data", 0.0},
    {11, "shock_asymptotics", "shock curve second order expansion", 0.0},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string out = "acceptance_runs";
    std::vector<int> only;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool verbose = false;
    app.add_option("--out", out, "run directory root");
    app.add_option("--only", only, "criterion numbers to run");
    app.add_option("--jobs", jobs, "worker threads");
    app.add_flag("-v,--verbose", verbose, "print every sub-criterion");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> selected(only.begin(), only.end());

    int failed = 0, ran = 0;
    for (const Item& it : kItems) {
        if (!selected.empty() && !selected.count(it.id)) continue;
        ++ran;
        ExperimentConfig cfg = default_config(it.experiment);
        cfg.jobs = jobs;
        bool pass = true;
        std::string why;
        double runtime = 0.0;
        try {
            const ExperimentReport rep = run_experiment(cfg);
            write_run_directory(rep, out);
            runtime = rep.runtime_seconds;
            for (const Criterion& c : rep.criteria) {
                if (c.status != Status::Pass) {
                    pass = false;
                    why += " " + c.name + "=" + to_string(c.status);
                }
                if (verbose) std::cout << "    " << to_string(c.status) << " " << c.name << ": " << c.detail << '\n';
            }
            if (rep.criteria.empty()) {
                pass = false;
                why += " no criteria evaluated";
            }
            if (it.time_limit > 0.0 && runtime >= it.time_limit) {
                pass = false;
                why += " runtime " + std::to_string(runtime) + "s over " + std::to_string(it.time_limit) + "s";
            }
        } catch (const std::exception& e) {
            pass = false;
            why = std::string(" error: ") + e.what();
        }
        if (!pass) ++failed;
        std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << it.id << "  " << it.title << "  ("
                  << runtime << " s)" << (pass ? "" : " :" + why) << std::endl;
    }
    std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
