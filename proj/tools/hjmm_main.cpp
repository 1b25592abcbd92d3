// Batch front-end: one experiment per invocation, or the experiment catalog.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hjmm/hjmm.h"

namespace {

int list(bool as_json)
{
    if (as_json) {
        char* text = nullptr;
        if (hjmm_catalog_json(&text) != HJMM_OK) {
            std::cerr << "hjmm: error: " << hjmm_last_error() << "\n";
            return 1;
        }
        std::cout << text;
        hjmm_string_free(text);
        return 0;
    }
    for (std::size_t i = 0; i < hjmm_experiment_count(); ++i) {
        const char* tag = nullptr;
        const char* desc = nullptr;
        hjmm_experiment_info(i, &tag, &desc);
        std::printf("%-11s %s\n", tag, desc);
    }
    return 0;
}

int run(const std::string& config, const std::string& out, const std::uint64_t* seed, int threads, bool as_json)
{
    hjmm_run* r = nullptr;
    const hjmm_status s = hjmm_run_config(config.c_str(), out.c_str(), seed, threads, &r);
    if (s != HJMM_OK) {
        std::cerr << "hjmm: error [" << hjmm_status_string(s) << "]: " << hjmm_last_error() << "\n";
        return 1;
    }
    const int code = hjmm_run_exit_code(r);
    if (as_json) {
        std::cout << hjmm_run_report(r);
    } else {
        std::cout << (code == 0 ? "pass" : "fail") << "  " << hjmm_run_field_path(r) << "  "
                  << hjmm_run_report_path(r) << "\n";
    }
    if (code == 2) {
        std::cerr << "hjmm: experiment over tolerance, see " << hjmm_run_report_path(r) << "\n";
    }
    hjmm_run_free(r);
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Minmax and viscosity solutions of evolutive Hamilton-Jacobi problems"};
    app.fallthrough();
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    int threads = 0;
    bool as_json = false;
    app.add_option("--config", config, "experiment config (JSON)")->envname("HJMM_CONFIG");
    app.add_option("--out", out, "output directory")->envname("HJMM_OUT");
    auto* seed_opt = app.add_option("--seed", seed, "seed recorded in the report")->envname("HJMM_SEED");
    app.add_option("--threads", threads, "worker threads")->envname("HJMM_THREADS")->check(CLI::PositiveNumber);
    app.add_flag("--json", as_json, "machine-readable output")->envname("HJMM_JSON");

    auto* run_cmd = app.add_subcommand("run", "run one experiment config");
    run_cmd->add_option("config", config, "experiment config (JSON)")->required();
    app.add_subcommand("list", "list the experiment catalog");
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "hjmm: usage error: " << e.what() << "\n" << app.help();
        return 1;
    }

    const std::uint64_t* seed_ptr = seed_opt->count() > 0 ? &seed : nullptr;
    if (app.got_subcommand("list") || config.empty()) {
        return list(as_json);
    }
    return run(config, out, seed_ptr, threads, as_json);
}
