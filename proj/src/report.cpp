#include "stablefield/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stablefield/io.hpp"

namespace stablefield {

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Analytic: return "analytic";
        case Provenance::DerivedOracle: return "derived-oracle";
        case Provenance::MonteCarlo: return "monte-carlo";
    }
    throw std::logic_error("unknown provenance");
}

CheckResult CheckResult::make(std::string name, double target, double estimate, double se,
                              double tolerance, Provenance prov) {
    if (!(std::isfinite(tolerance) && tolerance >= 0.0))
        throw std::invalid_argument("check tolerance must be finite and >= 0: " + name);
    CheckResult c;
    c.name = std::move(name);
    c.target = target;
    c.estimate = estimate;
    c.se = se;
    c.tolerance = tolerance;
    c.provenance = prov;
    c.pass = std::isfinite(estimate) && std::abs(estimate - target) <= tolerance;
    return c;
}

nlohmann::json CheckResult::to_json() const {
    return {{"check", name},
            {"target", round_g9(target)},
            {"estimate", round_g9(estimate)},
            {"se", round_g9(se)},
            {"tolerance", round_g9(tolerance)},
            {"pass", pass},
            {"provenance", provenance_name(provenance)}};
}

bool ExperimentReport::all_pass() const {
    if (partial) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return !checks.empty();
}

double ExperimentReport::max_deviation() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, std::abs(c.estimate - c.target));
    return m;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    return {{"experiment", experiment},
            {"seed", seed},
            {"wall_time_s", round_g9(wall_time_s)},
            {"config", config},
            {"checks", arr},
            {"all_pass", all_pass()},
            {"partial", partial}};
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << "check,target,estimate,se,tolerance,pass,provenance\n";
    for (const auto& c : checks) {
        os << c.name << "," << format_g9(c.target) << "," << format_g9(c.estimate) << ","
           << format_g9(c.se) << "," << format_g9(c.tolerance) << "," << (c.pass ? 1 : 0) << ","
           << provenance_name(c.provenance) << "\n";
    }
    return os.str();
}

Stopwatch::Stopwatch()
    : start_ns_(static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(
              std::chrono::steady_clock::now().time_since_epoch())
              .count())) {}

double Stopwatch::seconds() const {
    const auto now = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
    return static_cast<double>(now - start_ns_) * 1e-9;
}

}  // namespace stablefield
