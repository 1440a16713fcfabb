#include <algorithm>
#include <iostream>
#include <thread>

#include "equinet/acceptance.hpp"

int main() {
    int jobs = static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
    std::vector<equinet::CriterionResult> results = equinet::run_acceptance(jobs);
    std::cout << equinet::acceptance_report_text(results);
    for (const equinet::CriterionResult& c : results)
        if (!c.pass) return 1;
    return 0;
}
