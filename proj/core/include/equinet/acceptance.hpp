#pragma once

#include <string>
#include <vector>

namespace equinet {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // deterministic, floats at 12 significant digits
};

/// Criteria 1-8 with their tolerances pinned in code.
std::vector<CriterionResult> run_acceptance_core(int jobs = 1);

/// Criteria 1-9. Criterion 9 runs the core a second time and demands a
/// byte-identical report.
std::vector<CriterionResult> run_acceptance(int jobs = 1);

/// One line per criterion; contains no timing, so repeated runs must match
/// byte for byte.
std::string acceptance_report_text(const std::vector<CriterionResult>& results);

} // namespace equinet
