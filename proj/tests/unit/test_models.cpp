#include <doctest.h>

#include <cmath>

#include "nmqj/errors.hpp"
#include "nmqj/models.hpp"

using namespace nmqj;

TEST_CASE("default model layouts") {
    const auto jc = build_jaynes_cummings();
    CHECK(jc.dim == 2);
    REQUIRE(jc.channels.size() == 1);
    CHECK(jc.channels[0].jump(1, 0).real() == 1.0);
    CHECK(std::norm(jc.initial_state[0]) == doctest::Approx(9.0 / 13.0));

    const auto lambda = build_lambda();
    CHECK(lambda.channels[1].jump(2, 0).real() == 1.0);
    const auto vee = build_vee();
    CHECK(vee.channels[1].jump(2, 1).real() == 1.0);
    const auto ladder = build_ladder(LadderStart::Excited);
    CHECK(ladder.channels[1].jump(2, 1).real() == 1.0);
    CHECK(std::norm(ladder.initial_state[0]) == doctest::Approx(1.0));
    CHECK(std::norm(build_ladder().initial_state[0]) == doctest::Approx(16.0 / 21.0));
}

TEST_CASE("model names") {
    CHECK(parse_model_kind("jc") == ModelKind::JaynesCummings);
    CHECK(parse_model_kind("v") == ModelKind::Vee);
    CHECK(parse_model_kind("ladder") == ModelKind::Ladder);
    CHECK_FALSE(parse_model_kind("spin-boson").has_value());
}

TEST_CASE("overrides are validated") {
    ModelOverrides ov;
    ov.detunings = std::vector<double>{1.0};
    CHECK_THROWS_AS(build_lambda(ov), ValidationError);
    ModelOverrides zero;
    zero.initial_amplitudes = std::vector<Complex>{0.0, 0.0};
    CHECK_THROWS_AS(build_jaynes_cummings(zero), ValidationError);
    ModelOverrides rates;
    rates.constant_rates = std::vector<double>{0.5, 0.25};
    const auto m = build_vee(rates);
    CHECK(m.channels[1].rate->decay_rate(3.0) == 0.25);
}

TEST_CASE("master equation preserves trace and hermiticity") {
    ModelOverrides ov;
    ov.lamb_shift = true;
    const auto m = build_ladder(LadderStart::Mixed, ov);
    const auto rho = outer(m.initial_state);
    for (double t : {0.2, 1.0, 2.7}) {
        const auto d = master_equation_rhs(m, rho, t);
        CHECK(std::abs(d.trace()) < 1e-14);
        CHECK(d.hermiticity_defect() < 1e-14);
    }
}

TEST_CASE("Lamb shift hamiltonian is off unless enabled") {
    const auto m = build_jaynes_cummings();
    const double lamb[] = {0.8};
    CHECK(lamb_shift_hamiltonian(m, lamb).max_abs() == 0.0);
    ModelOverrides ov;
    ov.lamb_shift = true;
    const auto h = lamb_shift_hamiltonian(build_jaynes_cummings(ov), lamb);
    CHECK(h.max_abs() > 0.0);
    CHECK(h.hermiticity_defect() == 0.0);
}
