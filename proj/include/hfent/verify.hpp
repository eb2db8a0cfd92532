#pragma once

// Seeded self-check suite behind `hfent verify`: every randomized property
// draws from one central generator and logs its draw count, so identical
// seeds give byte-identical reports (no timing data in the JSON).

#include <cstdint>
#include <string>
#include <vector>

namespace hfent {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;
};

struct VerifyReport {
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    bool all_pass = false;

    std::string to_json() const;
};

VerifyReport run_verify(std::uint64_t seed);

}  // namespace hfent
