#pragma once

// Run configuration, serialization and oracle comparison for the command
// line front end.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nmqj/engine.hpp"
#include "nmqj/models.hpp"
#include "nmqj/series.hpp"

namespace nmqj {

struct ModelConfig {
    ModelKind kind = ModelKind::JaynesCummings;
    ModelOverrides overrides;
};

struct OutputConfig {
    std::filesystem::path directory = ".";
    bool csv = true;
    bool json = true;
};

struct ComparisonConfig {
    bool analytic = true;
    bool rk4 = true;
    /// Ensemble vs oracle, absolute, on populations and coherence magnitudes.
    double statistical_tolerance = 0.01;
    /// Analytic vs RK4.
    double oracle_tolerance = 1e-6;
    /// Eigenvalue floor for the ensemble series; default 5 / sqrt(N).
    std::optional<double> positivity_tolerance;
};

struct RunConfig {
    ModelConfig model;
    EngineConfig engine;
    OutputConfig output;
    ComparisonConfig comparison;

    ModelSpec build_model() const;
};

/// Parses and validates a JSON run configuration. Unknown keys are
/// rejected. Throws ParseError (malformed JSON, wrong types, unknown keys)
/// or ValidationError (out-of-range values).
RunConfig parse_config(std::string_view text);

/// One row per recorded time: t, then rho row-major with Re/Im interleaved,
/// then the decay rate of every channel, then the count of every registry
/// entry. Numbers use the shortest round-trip decimal form.
std::string series_to_csv(const TrajectorySeries& series);
TrajectorySeries series_from_csv(std::string_view text);

/// Newline-delimited JSON, one object per jump event.
std::string events_to_ndjson(std::span<const JumpEvent> events);

struct ElementDeviation {
    std::string element;  // "rho_aa" or "|rho_ab|"
    double max_deviation = 0.0;
};

struct CompareReport {
    std::vector<ElementDeviation> elements;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    /// Last time included in the comparison.
    double compared_until = 0.0;
};

/// Populations by value, coherences by magnitude. Throws GridMismatch when
/// the time grids differ. Only times <= `until` are compared.
CompareReport compare_series(const TrajectorySeries& a, const TrajectorySeries& b, double tol,
                             std::optional<double> until = std::nullopt);

struct ScenarioReport {
    int exit_code = 0;
    nlohmann::json summary;
    SimulationResult result;
};

/// Runs the ensemble and the enabled oracles and writes series.csv,
/// analytic.csv, rk4.csv, summary.json and events.ndjson into the output
/// directory. Exit code 0 when every enabled comparison passes, 1 otherwise,
/// 3 on runtime failure (I/O, step too large).
ScenarioReport run_scenario(const RunConfig& cfg);

}  // namespace nmqj
