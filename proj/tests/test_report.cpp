#include <doctest.h>

#include <cmath>

#include "critlat/report.hpp"

using namespace critlat;

TEST_CASE("floats keep 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2.0");
    CHECK(format_double(NAN) == "null");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    nlohmann::json j = {{"b", 1.5}, {"a", {1, 2.25}}};
    CHECK(dump_json(j) == "{\"a\":[1,2.25],\"b\":1.5}");
}

TEST_CASE("empty report") {
    ExperimentReport r;
    CHECK(r.all_pass());
    std::string js = serialize(r, ReportFormat::json);
    nlohmann::json j = nlohmann::json::parse(js);
    CHECK(j["schema"] == kReportSchema);
    CHECK(j["quantities"].empty());
    CHECK(serialize(r, ReportFormat::csv) == "quantity,value,std_error,n_samples,seed\n");
}

TEST_CASE("round trip and CSV rows") {
    ExperimentReport r;
    r.command = "sample";
    r.params["q"] = "2";
    r.seed = 7;
    r.seed_source = "flag";
    Quantity& e = r.add("crossing:1", 0.25);
    e.std_error = 0.0125;
    e.n_samples = 1200;
    r.check("gap", 3e-13, 1e-10, true);
    r.data["table"] = {1.0 / 3.0, 2};
    ExperimentReport back = report_from_json(nlohmann::json::parse(serialize(r, ReportFormat::json)));
    CHECK(back.command == r.command);
    CHECK(back.params == r.params);
    CHECK(back.seed == 7);
    REQUIRE(back.quantities.size() == 2);
    CHECK(back.quantities[0].std_error.value() == 0.0125);
    CHECK(back.quantities[0].n_samples.value() == 1200);
    CHECK(back.quantities[1].pass.value());
    CHECK(back.data["table"][0].get<double>() == 1.0 / 3.0);
    CHECK(serialize(back, ReportFormat::json) == serialize(r, ReportFormat::json));
    std::string csv = serialize(r, ReportFormat::csv);
    CHECK(csv.find("crossing:1,0.25,0.012500000000000001,1200,7\n") != std::string::npos);
    CHECK(csv.find("gap,2.9999999999999998e-13,,,7\n") != std::string::npos);
    r.check("bad", 1.0, 0.5, false);
    CHECK_FALSE(r.all_pass());
    CHECK(nlohmann::json::parse(serialize(r, ReportFormat::json))["pass"] == false);
    CHECK_THROWS(parse_format("xml"));
}
