#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace netsize {

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    double seconds = 0.0;
    std::string first_failure; // empty when clean
    bool passed() const { return failures == 0; }
};

struct VerifyOptions {
    std::uint64_t seed = 20240803;
    int cases = 200; // scales every randomized suite
    bool corrupt_lambda2_bound = false; // test hook: forces a failing check
};

/// Runs every randomized property suite (spectral bounds, equilibria,
/// secant decomposition, protocol identities, integrator cross-checks).
std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options);

bool all_passed(const std::vector<SuiteResult>& results);

std::string format_suite_table(const std::vector<SuiteResult>& results);

} // namespace netsize
