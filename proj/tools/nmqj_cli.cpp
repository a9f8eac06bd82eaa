#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nmqj/acceptance.hpp"
#include "nmqj/errors.hpp"
#include "nmqj/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw nmqj::Error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int simulate(const std::string& path) {
    nmqj::RunConfig cfg;
    try {
        cfg = nmqj::parse_config(read_file(path));
    } catch (const nmqj::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nmqj::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nmqj::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    const auto report = nmqj::run_scenario(cfg);
    if (report.summary.contains("error")) {
        std::cerr << "error: " << report.summary["error"].get<std::string>() << "\n";
        return report.exit_code;
    }
    for (const auto& w : report.summary["warnings"]) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
    for (const auto& c : report.summary["comparisons"]) {
        std::printf("%-22s max deviation %.3e (tolerance %.1e) %s\n",
                    c["name"].get<std::string>().c_str(), c["max_deviation"].get<double>(),
                    c["tolerance"].get<double>(), c["pass"].get<bool>() ? "ok" : "FAIL");
    }
    std::printf("outputs written to %s\n", cfg.output.directory.string().c_str());
    return report.exit_code;
}

int compare(const std::string& a, const std::string& b, double tol) {
    nmqj::TrajectorySeries sa, sb;
    try {
        sa = nmqj::series_from_csv(read_file(a));
        sb = nmqj::series_from_csv(read_file(b));
    } catch (const nmqj::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    nmqj::CompareReport r;
    try {
        r = nmqj::compare_series(sa, sb, tol);
    } catch (const nmqj::GridMismatch& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    for (const auto& e : r.elements) {
        std::printf("%-10s %.6e\n", e.element.c_str(), e.max_deviation);
    }
    std::printf("max deviation %.6e, tolerance %.1e: %s\n", r.max_deviation, tol,
                r.pass ? "pass" : "FAIL");
    return r.pass ? 0 : 1;
}

int rates(const std::string& name, double t_max, double dt, bool excited) {
    const auto kind = nmqj::parse_model_kind(name);
    if (!kind) {
        std::cerr << "unknown model '" << name << "'\n";
        return 2;
    }
    nmqj::ModelOverrides ov;
    if (excited) {
        ov.ladder_start = nmqj::LadderStart::Excited;
    }
    const auto model = nmqj::build_model(*kind, ov);
    std::printf("t");
    for (const auto& ch : model.channels) {
        std::printf(",delta_%d", ch.label);
    }
    for (const auto& ch : model.channels) {
        std::printf(",lambda_%d", ch.label);
    }
    std::printf("\n");
    const auto n = static_cast<std::size_t>(std::llround(t_max / dt));
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        std::printf("%.6g", t);
        for (const auto& ch : model.channels) {
            std::printf(",%.10g", ch.rate->decay_rate(t));
        }
        for (const auto& ch : model.channels) {
            std::printf(",%.10g", ch.rate->lamb_shift_rate(t));
        }
        std::printf("\n");
    }
    return 0;
}

int selftest() {
    bool ok = true;
    for (const auto& r : nmqj::run_acceptance_suite()) {
        std::printf("%s\n", nmqj::format_result(r).c_str());
        std::fflush(stdout);
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-Markovian quantum jump simulator"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "Run a scenario from a JSON config");
    sim->add_option("config", config_path, "Config file")->required();

    std::string csv_a, csv_b;
    double tol = 0.01;
    auto* cmp = app.add_subcommand("compare", "Compare two series CSV files");
    cmp->add_option("a", csv_a)->required();
    cmp->add_option("b", csv_b)->required();
    cmp->add_option("--tol", tol, "Absolute tolerance")->check(CLI::PositiveNumber);

    std::string model = "jc";
    double t_max = 6.0, dt = 0.1;
    bool excited = false;
    auto* rt = app.add_subcommand("rates", "Print decay and Lamb-shift rates as CSV");
    rt->add_option("--model", model, "jc, lambda, vee or ladder");
    rt->add_option("--t-max", t_max)->check(CLI::NonNegativeNumber);
    rt->add_option("--dt", dt)->check(CLI::PositiveNumber);
    rt->add_flag("--excited", excited, "Ladder starting in the top level");

    auto* st = app.add_subcommand("selftest", "Run the acceptance checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        if (*sim) return simulate(config_path);
        if (*cmp) return compare(csv_a, csv_b, tol);
        if (*rt) return rates(model, t_max, dt, excited);
        if (*st) return selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
