#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace critlat {

constexpr int kReportSchema = 1;

struct Quantity {
    std::string name;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<std::int64_t> n_samples;
    std::optional<double> tolerance;
    std::optional<bool> pass;
};

struct ExperimentReport {
    std::string command;                        // echo of the invocation
    std::map<std::string, std::string> params;  // effective parameters, file and flags merged
    std::uint64_t seed = 0;
    std::string seed_source = "default";        // default, env, config or flag
    std::vector<Quantity> quantities;
    nlohmann::json data = nlohmann::json::object();  // tables and field dumps
    std::optional<double> wall_time;            // seconds; only when requested

    Quantity& add(const std::string& name, double value);
    Quantity& check(const std::string& name, double value, double tol, bool pass);
    bool all_pass() const;
};

nlohmann::json to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);

// keys sorted, floats with 17 significant digits, non-finite values as null
std::string dump_json(const nlohmann::json& j);
std::string format_double(double x);

enum class ReportFormat { json, csv };
ReportFormat parse_format(const std::string& s);
std::string serialize(const ExperimentReport& r, ReportFormat f);

}  // namespace critlat
