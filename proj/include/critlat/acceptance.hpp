#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace critlat {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double budget = 0.0;  // seconds
    std::vector<std::pair<std::string, double>> values;
    std::string detail;
};

struct AcceptanceOptions {
    // smaller sample sizes and strips; the verdicts are then only indicative
    bool quick = false;
    std::uint64_t seed = 20240611;
    std::set<int> only;  // empty: all twelve
    std::string fixtures_dir;
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);
std::string format_line(const CriterionResult& r);

}  // namespace critlat
