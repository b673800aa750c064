#include "prodgeo/report.hpp"

#include <doctest.h>

using namespace prodgeo;

namespace {

Report sample_report() {
    Report r;
    r.command = "analyze";
    r.echo("entry", "slice-s2");
    r.echo("grid", "4");
    r.add("unit-relation", 3.14159265358979e-13, 1e-10);
    r.add("self-adjointness", 2.5e-9, 1e-9, "worst at corner");
    r.add_flag("expected-spectrum", true, "matched");
    return r;
}

} // namespace

TEST_CASE("summary is pass iff every check passes") {
    Report r = sample_report();
    CHECK_FALSE(r.pass()); // self-adjointness exceeds its tolerance above
    r.checks[1].pass = true;
    CHECK(r.pass());
}

TEST_CASE("text rendering is byte-stable and carries 12 significant digits") {
    const std::string a = render_text(sample_report());
    const std::string b = render_text(sample_report());
    CHECK(a == b);
    CHECK(a.find("tool: prodgeo 0.1.0") == 0);
    CHECK(a.find("3.14159265359e-13") != std::string::npos);
    CHECK(a.find("[fail] self-adjointness") != std::string::npos);
    CHECK(a.find("summary: fail") != std::string::npos);
    CHECK(a.find("note=worst at corner") != std::string::npos);
}

TEST_CASE("structured rendering is valid-looking JSON with fixed key order") {
    const std::string a = render_structured(sample_report());
    CHECK(a == render_structured(sample_report()));
    CHECK(a.find("\"tool\": \"prodgeo 0.1.0\"") != std::string::npos);
    CHECK(a.find("\"config\": {\"entry\": \"slice-s2\", \"grid\": \"4\"}") != std::string::npos);
    CHECK(a.find("\"status\": \"fail\"") != std::string::npos);
    CHECK(a.find("\"summary\": \"fail\"") != std::string::npos);
    // braces balance
    int depth = 0;
    for (char ch : a) {
        if (ch == '{') ++depth;
        if (ch == '}') --depth;
        CHECK(depth >= 0);
    }
    CHECK(depth == 0);
}

TEST_CASE("format_double uses %.12g") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("curve CSV header matches the documented schema") {
    std::vector<CurveRow> rows = {{0.5, 1, 0.25, 0.2500001}};
    const std::string csv = render_curve_csv(rows);
    CHECK(csv.rfind("t,lambda_index,predicted,measured\n", 0) == 0);
    CHECK(csv.find("0.5,1,0.25,0.2500001") != std::string::npos);
}
