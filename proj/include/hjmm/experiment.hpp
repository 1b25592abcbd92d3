#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hjmm/datum.hpp"
#include "hjmm/hamiltonian.hpp"

namespace hjmm {

struct ExperimentInfo {
    std::string tag;
    std::string description;
    std::vector<std::string> required;  // config keys beyond "experiment"
};

/// solve, compare, markov, hysteresis, splitting, hopf, c0.
const std::vector<ExperimentInfo>& experiment_catalog();
std::string catalog_json();

/// Command-line overrides; unset fields fall back to the config file.
struct RunOverrides {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

struct RunOutcome {
    int exit_code = 1;  // 0 pass, 2 residual over tolerance, 1 config or solver error
    std::string tag;
    std::string report;  // JSON text, also written to report_<tag>.json
    std::string field_path;
    std::string report_path;
};

/// Parses and validates the config (Config errors), runs one experiment and
/// writes field_<tag>.csv and report_<tag>.json under out_dir. Solver errors
/// propagate as hjmm::Error.
RunOutcome run_config_text(const std::string& json_text, const std::string& default_tag, const RunOverrides& o = {});
RunOutcome run_config_file(const std::string& path, const RunOverrides& o = {});

/// The "hamiltonian" and "datum" objects of a config on their own.
HamiltonianSpec hamiltonian_from_json(const std::string& text);
DatumSpec datum_from_json(const std::string& text);

}  // namespace hjmm
