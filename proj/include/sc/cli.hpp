#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sc/types.hpp"

namespace sc::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BetaGrid {
    double min_exponent = 2.0;
    double max_exponent = 5.0;
    int points_per_decade = 5;

    std::vector<double> betas() const;
};

struct ExperimentConfig {
    // Either a zoo generator...
    std::string generator;
    std::map<std::string, double> scalar_params;
    std::map<std::string, std::vector<double>> array_params;
    // ...or a graph file plus cluster.
    std::string graph_file;
    std::vector<std::string> cluster;

    std::vector<Complex> z_values;
    BetaGrid beta_grid;
    std::vector<std::string> checks;
    std::string expectation = "convergent";  // or "divergent"
    std::string output_dir = ".";
    std::uint64_t seed = 0;

    std::string normalized() const;  // canonical JSON echo
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Known check names, in canonical order.
const std::vector<std::string>& known_checks();

/// Runs the experiment, writes report.json and curve CSVs into output_dir.
/// Returns the process exit status (0 ok, 1 check failure, 3 numerical
/// failure).
int run(const ExperimentConfig& config);

/// Full command-line entry point: run / validate / zoo list.
int main_entry(int argc, const char* const* argv);

}  // namespace sc::cli
