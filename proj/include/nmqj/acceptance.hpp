#pragma once

#include <string>
#include <vector>

namespace nmqj {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

/// Runs one end-to-end check (1 to 8). Runtime above the budget fails it.
CriterionResult run_criterion(int id);

std::vector<CriterionResult> run_acceptance_suite();

/// "PASS  3  name  detail  (1.23 s)"
std::string format_result(const CriterionResult& r);

}  // namespace nmqj
