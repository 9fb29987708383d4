// The cross-module acceptance suite behind `gergm validate`: every criterion
// runs at its pinned tolerance and reports one pass/fail line.
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gergm::acceptance {

struct CriterionResult {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

struct Options {
    int jobs = 1;
    std::string suite = "all";  // all | gaussian | variational | sampler |
                                // homomorphism | cutdist | rate | estimation |
                                // quartic
};

std::vector<CriterionResult> run(const Options& opts,
                                 std::ostream* progress = nullptr);

// Prints "PASS/FAIL criterion <id>: <name> -- <detail>" lines; returns the
// number of failures.
int report(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace gergm::acceptance
