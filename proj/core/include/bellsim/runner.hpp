#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bellsim/config.hpp"

namespace bellsim {

struct RunOutputs {
    std::vector<std::filesystem::path> files;
};

// Environment variable BELLSIM_OUT, when set, overrides cfg.out_dir.
std::filesystem::path resolve_out_dir(const RunConfig& cfg);

// Executes the configured experiment and writes CSV outputs (correlation
// tables, oracle comparison, CHSH report; event logs for the photon CHSH run).
RunOutputs run(const RunConfig& cfg);

// Repeats a reduced run per value of one parameter (phi, W, eta, gamma,
// alpha, chi) and writes a long-format CSV keyed by (parameter, value).
RunOutputs sweep(const RunConfig& cfg, const std::string& parameter,
                 const std::vector<double>& values);

// Writes closed-form reference tables with the same schemas as run().
RunOutputs oracle_report(const RunConfig& cfg);

// Re-analyzes previously written event logs over a list of window widths.
RunOutputs analyze_logs(const std::filesystem::path& station1_csv,
                        const std::filesystem::path& station2_csv,
                        double tau, const std::vector<double>& W_list,
                        const std::filesystem::path& out_dir,
                        const std::string& run_name);

} // namespace bellsim
