#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nmqj/errors.hpp"
#include "nmqj/harness.hpp"

using namespace nmqj;

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"({
  "model": {"name": "lambda", "detunings": [-3, 5], "coupling": 2},
  "engine": {"dt": 0.005, "t_max": 2, "ensemble_size": 1000, "seed": 4},
  "output": {"directory": "out", "formats": ["csv"]},
  "comparison": {"tolerance": 0.02}
})");
    CHECK(cfg.model.kind == ModelKind::Lambda);
    CHECK(cfg.engine.dt == 0.005);
    CHECK(cfg.engine.ensemble_size == 1000);
    CHECK(cfg.output.csv);
    CHECK_FALSE(cfg.output.json);
    CHECK(cfg.comparison.statistical_tolerance == 0.02);
}

TEST_CASE("config errors carry a line number") {
    try {
        parse_config("{\n  \"engine\": {\n    \"dt\": \"fast\"\n  }\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.field() == "engine.dt");
    }
    CHECK_THROWS_AS(parse_config("{\"engine\": {\"dtt\": 1}}"), ParseError);
    CHECK_THROWS_AS(parse_config("{\"model\": {\"name\": \"qutrit\"}}"), ValidationError);
    CHECK_THROWS_AS(parse_config("{\"engine\": {\"ensemble_size\": 0}}"), ValidationError);
    CHECK_THROWS_AS(parse_config("{\"engine\": "), ParseError);
}

TEST_CASE("CSV round trip is exact") {
    TrajectorySeries s;
    s.dim = 2;
    for (int k = 0; k < 3; ++k) {
        DensityMatrix r(2);
        r(0, 0) = 0.1 * k + 1.0 / 3.0;
        r(0, 1) = Complex{1e-17, -0.2};
        r(1, 0) = std::conj(r(0, 1));
        r(1, 1) = 1.0 - r(0, 0).real();
        s.times.push_back(0.1 * k);
        s.rho.push_back(r);
        s.rates.push_back({-0.5 * k});
        s.counts.push_back({100 - k, k});
    }
    const auto text = series_to_csv(s);
    const auto back = series_from_csv(text);
    CHECK(series_to_csv(back) == text);
    CHECK(back.rho[2](0, 0) == s.rho[2](0, 0));
    CHECK(back.counts[1][1] == 1);
}

TEST_CASE("CSV parser rejects malformed input") {
    CHECK_THROWS_AS(series_from_csv("t,re_rho_00\n0,1\n"), ParseError);
    CHECK_THROWS_AS(series_from_csv("t,foo\n0,1\n"), ParseError);
    const std::string h = "t,re_rho_00,im_rho_00\n";
    CHECK_THROWS_AS(series_from_csv(h + "0.1,1,0\n0.1,1,0\n"), ParseError);
    CHECK_THROWS_AS(series_from_csv(h + "0,x,0\n"), ParseError);
}

TEST_CASE("comparison reports and grid checks") {
    const std::string h = "t,re_rho_00,im_rho_00,re_rho_01,im_rho_01,re_rho_10,im_rho_10,re_rho_11,im_rho_11\n";
    const auto a = series_from_csv(h + "0,1,0,0,0,0,0,0,0\n1,0.5,0,0.3,0.4,0.3,-0.4,0.5,0\n");
    const auto b = series_from_csv(h + "0,1,0,0,0,0,0,0,0\n1,0.52,0,0.5,0,0.5,0,0.48,0\n");
    const auto r = compare_series(a, b, 0.03);
    CHECK(r.pass);
    CHECK(r.max_deviation == doctest::Approx(0.02));
    CHECK(compare_series(a, b, 0.01, 0.5).pass);
    const auto c = series_from_csv(h + "0,1,0,0,0,0,0,0,0\n2,1,0,0,0,0,0,0,0\n");
    CHECK_THROWS_AS(compare_series(a, c, 0.1), GridMismatch);
}

TEST_CASE("scenario writes outputs and passes") {
    const auto dir = std::filesystem::temp_directory_path() / "nmqj_scenario_test";
    std::filesystem::remove_all(dir);
    auto cfg = parse_config(R"({"model": {"name": "jc"}, "engine": {"ensemble_size": 100000, "seed": 3}})");
    cfg.output.directory = dir;
    const auto report = run_scenario(cfg);
    CHECK(report.exit_code == 0);
    CHECK(report.summary["pass"].get<bool>());
    for (const char* f : {"series.csv", "analytic.csv", "rk4.csv", "summary.json", "events.ndjson"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    std::ifstream in(dir / "series.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("t,re_rho_00", 0) == 0);

    auto ladder = parse_config(R"({"model": {"name": "ladder", "ladder_start": "excited"}, "engine": {"t_max": 3}})");
    ladder.output.directory = dir / "ladder";
    const auto lr = run_scenario(ladder);
    CHECK(lr.exit_code == 0);
    CHECK_FALSE(lr.summary["memory_loss_time"].is_null());
    CHECK_FALSE(lr.summary["warnings"].empty());
    std::filesystem::remove_all(dir);
}
