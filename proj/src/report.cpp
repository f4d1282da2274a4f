#include "critlat/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace critlat {

Quantity& ExperimentReport::add(const std::string& name, double value) {
    quantities.push_back(Quantity{name, value, {}, {}, {}, {}});
    return quantities.back();
}

Quantity& ExperimentReport::check(const std::string& name, double value, double tol, bool pass) {
    Quantity& q = add(name, value);
    q.tolerance = tol;
    q.pass = pass;
    return q;
}

bool ExperimentReport::all_pass() const {
    for (const auto& q : quantities)
        if (q.pass && !*q.pass) return false;
    return true;
}

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // keep it a float on the way back in
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

void dump_to(const nlohmann::json& j, std::ostringstream& os) {
    using V = nlohmann::json::value_t;
    switch (j.type()) {
        case V::object: {
            os << '{';
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) os << ',';
                first = false;
                os << quote(k) << ':';
                dump_to(v, os);
            }
            os << '}';
            break;
        }
        case V::array: {
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ',';
                dump_to(j[i], os);
            }
            os << ']';
            break;
        }
        case V::number_float: os << format_double(j.get<double>()); break;
        default: os << j.dump(); break;
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
    std::ostringstream os;
    dump_to(j, os);
    return os.str();
}

nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["command"] = r.command;
    j["params"] = r.params;
    j["seed"] = r.seed;
    j["seed_source"] = r.seed_source;
    j["pass"] = r.all_pass();
    nlohmann::json qs = nlohmann::json::array();
    for (const auto& q : r.quantities) {
        nlohmann::json e;
        e["name"] = q.name;
        e["value"] = q.value;
        if (q.std_error) e["std_error"] = *q.std_error;
        if (q.n_samples) e["n_samples"] = *q.n_samples;
        if (q.tolerance) e["tolerance"] = *q.tolerance;
        if (q.pass) e["pass"] = *q.pass;
        qs.push_back(e);
    }
    j["quantities"] = qs;
    j["data"] = r.data;
    if (r.wall_time) j["wall_time_s"] = *r.wall_time;
    return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
    if (j.value("schema", 0) != kReportSchema) throw std::invalid_argument("unsupported report schema");
    ExperimentReport r;
    r.command = j.at("command").get<std::string>();
    r.params = j.at("params").get<std::map<std::string, std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.seed_source = j.at("seed_source").get<std::string>();
    for (const auto& e : j.at("quantities")) {
        Quantity q;
        q.name = e.at("name").get<std::string>();
        q.value = e.at("value").is_null() ? NAN : e.at("value").get<double>();
        if (e.contains("std_error")) q.std_error = e["std_error"].is_null() ? NAN : e["std_error"].get<double>();
        if (e.contains("n_samples")) q.n_samples = e["n_samples"].get<std::int64_t>();
        if (e.contains("tolerance")) q.tolerance = e["tolerance"].get<double>();
        if (e.contains("pass")) q.pass = e["pass"].get<bool>();
        r.quantities.push_back(q);
    }
    if (j.contains("data")) r.data = j["data"];
    if (j.contains("wall_time_s")) r.wall_time = j["wall_time_s"].get<double>();
    return r;
}

ReportFormat parse_format(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw std::invalid_argument("unknown format '" + s + "' (json or csv)");
}

std::string serialize(const ExperimentReport& r, ReportFormat f) {
    if (f == ReportFormat::json) return dump_json(to_json(r)) + "\n";
    std::string out = "quantity,value,std_error,n_samples,seed\n";
    for (const auto& q : r.quantities) {
        std::string name = q.name;
        if (name.find_first_of(",\"\n") != std::string::npos) {
            std::string esc = "\"";
            for (char c : name) esc += c == '"' ? std::string("\"\"") : std::string(1, c);
            name = esc + "\"";
        }
        out += name + "," + format_double(q.value) + "," + (q.std_error ? format_double(*q.std_error) : "") + "," +
               (q.n_samples ? std::to_string(*q.n_samples) : "") + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

}  // namespace critlat
