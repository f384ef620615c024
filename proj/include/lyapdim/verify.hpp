#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lyapdim {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Invariant checks over randomly generated instances, grouped per module.
std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed);

}  // namespace lyapdim
