#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nelsonlab/experiments.hpp"
#include "nelsonlab/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nelsonuv: numerical checks for a variable-coefficient quantum field model"};

    std::string scenario_arg;
    std::string out_dir;
    int threads = 1;
    std::vector<std::string> only;
    bool list = false;
    bool dump = false;

    app.add_option("-s,--scenario", scenario_arg,
                   "builtin scenario name or path to a scenario JSON file");
    app.add_option("-o,--out", out_dir, "directory for manifest.json and per-experiment CSVs");
    app.add_option("-t,--threads", threads, "worker threads for independent experiments")
        ->check(CLI::PositiveNumber);
    app.add_option("--only", only, "run only the named experiments (repeatable)");
    app.add_flag("--list", list, "list builtin scenarios and experiments, then exit");
    app.add_flag("--dump-scenario", dump, "print the resolved scenario JSON, then exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list) {
            std::printf("builtin scenarios:\n");
            for (const std::string& name : nelson::Scenario::builtin_names()) {
                std::printf("  %s\n", name.c_str());
            }
            std::printf("experiments:\n");
            for (const std::string& id : nelson::experiment_ids()) {
                std::printf("  %s\n", id.c_str());
            }
            return 0;
        }
        if (scenario_arg.empty()) {
            std::fprintf(stderr, "error: --scenario is required (try --list)\n");
            return 2;
        }

        const nelson::Scenario scenario = nelson::Scenario::load(scenario_arg);
        if (dump) {
            std::printf("%s\n", scenario.to_json().dump(2).c_str());
            return 0;
        }

        const std::vector<nelson::RunResult> results =
            nelson::run_scenario(scenario, only, threads);

        bool all_pass = true;
        for (const nelson::RunResult& res : results) {
            std::printf("[%s] %-22s %s\n", res.pass ? "PASS" : "FAIL", res.id.c_str(),
                        res.detail.c_str());
            all_pass = all_pass && res.pass;
        }
        if (!out_dir.empty()) {
            nelson::write_run_outputs(out_dir, scenario.to_json(), results);
            std::printf("wrote %s/manifest.json\n", out_dir.c_str());
        }
        std::printf("%zu/%zu experiments passed\n",
                    static_cast<std::size_t>(
                        std::count_if(results.begin(), results.end(),
                                      [](const nelson::RunResult& r) { return r.pass; })),
                    results.size());
        return all_pass ? 0 : 1;
    } catch (const nelson::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const nelson::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
