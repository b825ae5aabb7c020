#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geoplan {

/// Outcome of one randomized identity check.
struct CheckResult
{
    std::string name;
    int cases = 0;
    double worst = 0.0;     ///< largest residual observed
    double tolerance = 0.0;
    bool passed = false;
};

/// Runs the built-in identity suite (group maps, connection identities,
/// equation degenerations, potential gradient, sphere structure).
std::vector<CheckResult> run_identity_checks(std::uint64_t seed = 0);

} // namespace geoplan
