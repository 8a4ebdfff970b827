#pragma once

#include "seloqr/bic.hpp"
#include "seloqr/simulation.hpp"
#include "seloqr/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seloqr {

/// Everything a CLI invocation needs, after flag and config-file parsing.
struct RunConfig {
    std::string command;  // fit | select | simulate | check
    std::string input;
    std::string output;  // empty: JSON to stdout, companion CSVs skipped
    double tau = 0.5;
    std::optional<double> lambda;  // fit: defaults to 0.1 x mean check loss of y
    std::optional<double> gamma;   // fit: defaults to 10 sqrt(d) n^{-3/2}
    std::uint64_t seed = 12345;
    int threads = 1;

    FitConfig fit;
    BicConfig bic;

    // simulate
    Index sim_n = 200;
    Index sim_d = 0;  // 0: floor(2 n^{0.4})
    int sim_reps = 100;
    std::vector<double> sim_beta;  // empty: 2, -2, 1.5, then zeros
    std::string sim_error = "normal";
    double sim_error_param = 1.0;
    std::string sim_design = "gaussian_iid";
    double sim_rho = 0.5;
    std::vector<Index> n_ladder;  // nonempty: rate study over these n
    bool with_selection = false;
    double ci_level = 0.95;
};

/// Executes the command and writes the JSON report (and companion CSVs when
/// an output path is given). Returns 0; failures surface as exceptions that
/// the binary maps to exit codes 1 (usage), 2 (data), 3 (numerical).
int run(const RunConfig& cfg);

}  // namespace seloqr
