#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlab/errors.hpp"
#include "ftlab/experiments.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

using namespace ftlab;

namespace {

ExperimentConfig small_oracle(std::uint64_t seed) {
    ExperimentConfig c = default_config("riemann_oracle");
    c.seed = seed;
    c.params["count"] = 8;
    return c;
}

}  // namespace

TEST_CASE("config round trip") {
    for (const std::string& name : experiment_names()) {
        const ExperimentConfig c = default_config(name);
        CHECK(c.experiment == name);
        const json j = config_to_json(c);
        CHECK(config_to_json(config_from_json(j)) == j);
    }
    json j = {{"experiment", "riemann_oracle"}, {"seed", 17}, {"params", {{"count", 3}}}};
    const ExperimentConfig c = config_from_json(j);
    CHECK(c.seed == 17);
    CHECK(c.params["count"] == 3);
    CHECK(c.params.contains("amplitude"));
}

TEST_CASE("bad configs") {
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"schema_version", 2}, {"experiment", "hypotheses"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"system", "p-system-gamma2"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"experiment", "hypotheses"}, {"T", 0.0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"experiment", "hypotheses"}, {"jobs", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"experiment", "hypotheses"}, {"nu", "x"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"experiment", "no-such-thing"}}), ConfigError);
}

TEST_CASE("same seed gives the same report") {
    const std::string a = report_to_json(run_experiment(small_oracle(5))).dump();
    const std::string b = report_to_json(run_experiment(small_oracle(5))).dump();
    CHECK(a == b);
    ExperimentConfig threaded = small_oracle(5);
    threaded.jobs = 3;
    CHECK(report_to_json(run_experiment(threaded)).dump() == a);
}

TEST_CASE("parallel_for") {
    for (int jobs : {1, 4}) {
        std::vector<std::atomic<int>> hits(100);
        parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
        for (const auto& h : hits) CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(10, jobs,
                                     [](std::size_t i) {
                                         if (i == 7) throw std::runtime_error("boom");
                                     }),
                        std::runtime_error);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("called"); });
}

TEST_CASE("run directory") {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "ftlab_harness_test";
    fs::remove_all(root);
    ExperimentReport r = run_experiment(small_oracle(2));
    const fs::path dir = write_run_directory(r, root.string());
    for (const char* f : {"config.json", "report.json", "timing.json"}) CHECK(fs::exists(dir / f));
    for (const auto& [name, body] : r.csv) CHECK(fs::exists(dir / name));
    std::ifstream in(dir / "report.json");
    const json rep = json::parse(in);
    CHECK(rep["ok"] == r.ok());
    CHECK(rep["criteria"].size() == r.criteria.size());
    CHECK_FALSE(rep.contains("runtime_seconds"));
    fs::remove_all(root);
}

TEST_CASE("status strings and ok") {
    CHECK(to_string(Status::Pass) == "pass");
    CHECK(to_string(Status::Fail) == "fail");
    CHECK(to_string(Status::Inconclusive) == "inconclusive");
    ExperimentReport r;
    r.add("a", true, "");
    r.add_inconclusive("b", "");
    CHECK(r.ok());
    r.add("c", false, "");
    CHECK_FALSE(r.ok());
}
