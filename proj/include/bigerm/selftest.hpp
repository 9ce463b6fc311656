#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bigerm {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestOptions {
    std::uint64_t seed = 1;
    bool quick = false;
    std::string inject_fault;  // suite name forced to fail (used by tests)
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts);

}  // namespace bigerm
