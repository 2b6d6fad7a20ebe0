#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stablefield/karlin.hpp"
#include "stablefield/mdk.hpp"
#include "stablefield/report.hpp"

namespace stablefield {

// Fully resolved inputs of one experiment run. The seed is mandatory and has
// no default; parsing layers must set seed_set explicitly.
struct ExperimentConfig {
    std::string command;
    SetFamily family = SetFamily::separating(SpaceKind::Euclidean1);
    std::vector<SpacePoint> points;  // empty: per-command defaults
    double alpha = 2.0;
    std::optional<double> beta = 0.5;  // empty: base (non-fractional) field
    double alpha_prime = 2.0;
    std::size_t samples = 100'000;
    PrecisionBudget budget;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    int threads = 1;
    int pairs = 50;      // random point pairs for identity sweeps
    int instances = 20;  // randomized repetitions (parity, invariance)
    // karlin-converge
    std::vector<double> rhos{100.0, 1000.0, 10000.0};
    std::size_t realizations = 200;
    std::size_t cf_realizations = 10'000;
    double c_f = 1.0;
    SignLaw sign;
    double truncation_tol = 1e-6;

    void validate() const;  // ranges + mandatory seed
    nlohmann::json to_json() const;
};

// Per-subcommand runners. Each returns a report with embedded config; file
// emission is left to run_experiment.
ExperimentReport run_verify_mdk(const ExperimentConfig& cfg);
ExperimentReport run_frac_distance(const ExperimentConfig& cfg);
ExperimentReport run_parity_check(const ExperimentConfig& cfg);
ExperimentReport run_sample_fdd(const ExperimentConfig& cfg, std::string* csv_out = nullptr);
ExperimentReport run_sample_substable(const ExperimentConfig& cfg, std::string* csv_out = nullptr);
ExperimentReport run_invariance(const ExperimentConfig& cfg);
ExperimentReport run_gaussian_cov(const ExperimentConfig& cfg);
ExperimentReport run_karlin_converge(const ExperimentConfig& cfg, std::string* csv_out = nullptr);

// Dispatches on cfg.command, writes <command>-report.{json,csv} (and sample
// CSVs where applicable) into cfg.out_dir, prints a one-line summary.
// Returns 0 if every check passed, 1 otherwise; reports are written either
// way, flagged partial when a stage threw.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace stablefield
