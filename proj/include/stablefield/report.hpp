#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace stablefield {

// Where a check's target number comes from: a closed form, an independently
// derived numerical oracle, or a Monte Carlo estimate with its SE threshold.
enum class Provenance { Analytic, DerivedOracle, MonteCarlo };
std::string provenance_name(Provenance p);

struct CheckResult {
    std::string name;
    double target = 0.0;
    double estimate = 0.0;
    double se = 0.0;         // 0 for deterministic checks
    double tolerance = 0.0;  // absolute bound on |estimate - target|
    bool pass = false;
    Provenance provenance = Provenance::Analytic;

    // pass = |estimate - target| <= tolerance, both finite.
    static CheckResult make(std::string name, double target, double estimate, double se,
                            double tolerance, Provenance prov);
    nlohmann::json to_json() const;
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    nlohmann::json config = nlohmann::json::object();  // resolved inputs
    std::vector<CheckResult> checks;
    bool partial = false;  // a stage failed before producing all checks

    bool all_pass() const;
    double max_deviation() const;  // max |estimate - target| over checks
    nlohmann::json to_json() const;
    // check,target,estimate,se,tolerance,pass,provenance
    std::string to_csv() const;
};

// Wall-clock stopwatch for report timing.
class Stopwatch {
  public:
    Stopwatch();
    double seconds() const;

  private:
    std::uint64_t start_ns_;
};

}  // namespace stablefield
