#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cat0 {

/// Outcome of one seeded property suite.
struct SuiteVerdict {
    std::string name;
    bool passed = true;
    int checks = 0;
    int failures = 0;
    double worst = 0.0;      // largest violation seen (0 when none)
    double tolerance = 0.0;
    std::string detail;      // first failing case, if any
};

/// Seeded model-level property suites over the four shipped spaces:
/// cat0_comparison, convexity, busemann_lipschitz, transfer_invertibility,
/// displacement_nonnegative, horoball_convergence.
std::vector<SuiteVerdict> run_property_suites(std::uint64_t seed, int cases);

}  // namespace cat0
