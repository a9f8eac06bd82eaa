#include <doctest.h>

#include <cmath>

#include "nmqj/errors.hpp"
#include "nmqj/oracle.hpp"

using namespace nmqj;

namespace {

struct Reference {
    ModelKind kind;
    LadderStart start;
    double t;
    double populations[3];
    double coherence_ab;
};

// Dense-output Runge-Kutta (order 8) on the density matrix, tolerance 1e-13.
const Reference kReference[] = {
    {ModelKind::JaynesCummings, LadderStart::Mixed, 1.0,
     {0.393464236163939, 0.6065357638360607, 0.0}, 0.34794528135853653},
    {ModelKind::JaynesCummings, LadderStart::Mixed, 6.0,
     {0.14299904407136127, 0.8570009559286385, 0.0}, 0.209761068523484},
    {ModelKind::Lambda, LadderStart::Mixed, 3.0,
     {0.16290675862276308, 0.59872040146351, 0.23837283991372726}, 0.17615294146078536},
    {ModelKind::Vee, LadderStart::Mixed, 1.0,
     {0.14121030622245162, 0.26590174521772575, 0.5928879485598231}, 0.19377323568356708},
    {ModelKind::Ladder, LadderStart::Mixed, 6.0,
     {0.13944505014712982, 0.5469267108928925, 0.31362823895997766}, 0.11888544702631927},
    {ModelKind::Ladder, LadderStart::Excited, 1.1,
     {0.40954411365550625, 0.6075517708681906, -0.017095884523696665}, 0.0},
};

ModelSpec make(const Reference& r) {
    ModelOverrides ov;
    ov.ladder_start = r.start;
    return build_model(r.kind, ov);
}

}  // namespace

TEST_CASE("closed-form solutions match frozen reference values") {
    for (const auto& r : kReference) {
        const auto model = make(r);
        const auto rho = analytic_density(model, r.t);
        for (std::size_t i = 0; i < model.dim; ++i) {
            CHECK(rho(i, i).real() == doctest::Approx(r.populations[i]).epsilon(1e-8));
        }
        CHECK(std::abs(rho(0, 1)) == doctest::Approx(r.coherence_ab).epsilon(1e-8));
        const AnalyticSolution tabulated(model, 6.0);
        CHECK(max_abs_diff(tabulated(r.t), rho) < 1e-8);
    }
}

TEST_CASE("RK4 agrees with the closed forms with the Lamb shift on") {
    ModelOverrides ov;
    ov.lamb_shift = true;
    for (auto kind : {ModelKind::JaynesCummings, ModelKind::Lambda, ModelKind::Vee,
                      ModelKind::Ladder}) {
        const auto m = build_model(kind, ov);
        const auto grid = time_grid(4.0, 0.1);
        const auto rk4 = integrate_master_equation(m, grid, 0.001);
        for (std::size_t k = 0; k < grid.size(); k += 5) {
            CHECK(max_abs_diff(rk4.rho[k], analytic_density(m, grid[k])) < 1e-7);
        }
    }
}

TEST_CASE("positivity scan finds the ladder failure") {
    const auto m = build_ladder(LadderStart::Excited);
    const auto rk4 = integrate_master_equation(m, 3.0, 0.001, 0.01);
    const auto loss = positivity_scan(rk4);
    REQUIRE(loss.has_value());
    CHECK(*loss == doctest::Approx(1.02).epsilon(0.02));
    CHECK_FALSE(positivity_scan(integrate_master_equation(build_lambda(), 6.0, 0.001, 0.05)));
}

TEST_CASE("rate-equation signs for the two-level model") {
    const auto jc = build_jaynes_cummings();
    const auto series = analytic_series(jc, time_grid(6.0, 0.01));
    CHECK(rate_equation_sign_check(jc, series));
}

TEST_CASE("unsupported layouts and record grids") {
    ModelSpec m = build_jaynes_cummings();
    m.channels[0].jump = Matrix::transition(2, 0, 1);
    CHECK_THROWS_AS(analytic_density(m, 1.0), UnsupportedModel);
    CHECK_THROWS_AS(analytic_density(build_vee(), -1.0), NegativeTime);
}
