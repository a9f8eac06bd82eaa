#include <cmath>
#include <fstream>

#include "nmqj/errors.hpp"
#include "nmqj/harness.hpp"
#include "nmqj/oracle.hpp"

namespace nmqj {

namespace {

using nlohmann::ordered_json;

ordered_json matrix_json(const DensityMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

ordered_json optional_json(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json report_json(const std::string& name, const CompareReport& r) {
    ordered_json j;
    j["name"] = name;
    j["pass"] = r.pass;
    j["max_deviation"] = r.max_deviation;
    j["tolerance"] = r.tolerance;
    j["compared_until"] = r.compared_until;
    ordered_json el = ordered_json::object();
    for (const auto& e : r.elements) {
        el[e.element] = e.max_deviation;
    }
    j["elements"] = el;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

bool has_closed_form(const ModelSpec& model) {
    try {
        (void)analytic_density(model, 0.0);
        return true;
    } catch (const UnsupportedModel&) {
        return false;
    }
}

}  // namespace

ScenarioReport run_scenario(const RunConfig& cfg) {
    ScenarioReport report;
    ordered_json summary;
    try {
        const ModelSpec model = cfg.build_model();
        NmqjEngine engine(model, cfg.engine);
        report.result = engine.run();
        const auto& ens = report.result.series;
        const std::size_t n_total = static_cast<std::size_t>(cfg.engine.ensemble_size);

        summary["model"] = std::string(to_string(model.kind));
        summary["dim"] = model.dim;
        summary["ensemble_size"] = cfg.engine.ensemble_size;
        summary["dt"] = cfg.engine.dt;
        summary["t_max"] = cfg.engine.t_max;
        summary["seed"] = cfg.engine.rng_seed;
        summary["lamb_shift"] = model.lamb_shift_enabled;
        summary["final_time"] = ens.times.back();
        summary["final_rho"] = matrix_json(ens.rho.back());
        summary["effective_ensemble_size"] = report.result.effective_sizes;
        std::size_t max_neff = 0;
        for (auto n : report.result.effective_sizes) {
            max_neff = std::max(max_neff, n);
        }
        summary["max_effective_ensemble_size"] = max_neff;
        summary["registry_entries"] = ens.counts.empty() ? 0 : ens.counts.front().size();
        summary["jump_events"] = ens.events.size();
        summary["memory_loss_time"] = optional_json(report.result.memory_loss_time);
        summary["saturation_time"] = optional_json(report.result.saturation_time);

        ordered_json warnings = ordered_json::array();
        ordered_json comparisons = ordered_json::array();
        bool all_pass = true;

        const double ens_tol = cfg.comparison.positivity_tolerance.value_or(
            5.0 / std::sqrt(static_cast<double>(n_total)));
        std::optional<double> rk4_loss;
        const auto ens_loss = positivity_scan(ens, ens_tol);

        std::optional<TrajectorySeries> analytic, rk4;
        if (cfg.comparison.rk4) {
            rk4 = integrate_master_equation(model, ens.times, cfg.engine.dt / 10.0);
            rk4_loss = positivity_scan(*rk4, 1e-6);
        }
        if (cfg.comparison.analytic) {
            if (has_closed_form(model)) {
                analytic = analytic_series(model, ens.times);
            } else {
                warnings.push_back("no closed-form solution for this model; analytic comparison skipped");
            }
        }
        if (rk4_loss) {
            warnings.push_back("master-equation solution loses positivity at t = " +
                               std::to_string(*rk4_loss) +
                               "; ensemble comparisons stop before this time");
        }
        if (ens_loss) {
            warnings.push_back("ensemble density matrix loses positivity at t = " +
                               std::to_string(*ens_loss));
        }
        if (report.result.memory_loss_time) {
            warnings.push_back("memory loss: a reverse-jump source emptied while its channel was "
                               "negative at t = " +
                               std::to_string(*report.result.memory_loss_time));
        }
        if (report.result.saturation_time) {
            warnings.push_back("reverse-jump probabilities saturated at t = " +
                               std::to_string(*report.result.saturation_time));
        }
        summary["positivity"] = {{"rk4_loss_time", optional_json(rk4_loss)},
                                 {"ensemble_loss_time", optional_json(ens_loss)},
                                 {"ensemble_tolerance", ens_tol}};

        std::optional<double> until;
        if (rk4_loss) {
            until = *rk4_loss - 0.5 * cfg.engine.dt;
        }
        if (analytic) {
            auto r = compare_series(ens, *analytic, cfg.comparison.statistical_tolerance, until);
            all_pass = all_pass && r.pass;
            comparisons.push_back(report_json("ensemble_vs_analytic", r));
        }
        if (rk4) {
            auto r = compare_series(ens, *rk4, cfg.comparison.statistical_tolerance, until);
            all_pass = all_pass && r.pass;
            comparisons.push_back(report_json("ensemble_vs_rk4", r));
        }
        if (analytic && rk4) {
            auto r = compare_series(*analytic, *rk4, cfg.comparison.oracle_tolerance);
            all_pass = all_pass && r.pass;
            comparisons.push_back(report_json("analytic_vs_rk4", r));
        }
        summary["comparisons"] = comparisons;
        summary["warnings"] = warnings;
        summary["pass"] = all_pass;

        const auto& dir = cfg.output.directory;
        std::filesystem::create_directories(dir);
        if (cfg.output.csv) {
            write_file(dir / "series.csv", series_to_csv(ens));
            if (analytic) {
                write_file(dir / "analytic.csv", series_to_csv(*analytic));
            }
            if (rk4) {
                write_file(dir / "rk4.csv", series_to_csv(*rk4));
            }
        }
        if (cfg.output.json) {
            write_file(dir / "summary.json", summary.dump(2) + "\n");
            write_file(dir / "events.ndjson", events_to_ndjson(ens.events));
        }
        report.exit_code = all_pass ? 0 : 1;
    } catch (const ValidationError& e) {
        summary["error"] = e.what();
        report.exit_code = 2;
    } catch (const std::exception& e) {
        summary["error"] = e.what();
        report.exit_code = 3;
    }
    report.summary = nlohmann::json::parse(summary.dump());
    return report;
}

}  // namespace nmqj
