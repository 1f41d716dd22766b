#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csflow/random.hpp"

namespace csflow {

struct VerifyOptions {
    std::vector<std::string> checks; // empty: the whole suite
    int draws = 10;
    int points = 20;
    int riccati_m = 2, riccati_n = 2;
};

struct CheckResult {
    std::string name;
    bool passed = true;
    double value = 0;     // worst deviation seen
    double tolerance = 0; // zero for exact checks
    std::string detail;
    std::vector<std::string> failures;
};

// coefficients, golden, homomorphism, decoupling, riccati, quantum, phase, kernel, oscillator
const std::vector<std::string>& check_names();

// custom_table: JSON root table to use for the homomorphism check instead of A1..A3.
CheckResult run_check(const std::string& name, const VerifyOptions& opt, Rng& rng,
                      const std::optional<std::string>& custom_table = std::nullopt);

std::string report_json(const std::vector<CheckResult>& results, std::uint64_t seed);
std::string report_text(const std::vector<CheckResult>& results);

} // namespace csflow
