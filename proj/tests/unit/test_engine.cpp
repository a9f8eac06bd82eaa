#include <doctest.h>

#include <cmath>

#include "nmqj/engine.hpp"
#include "nmqj/errors.hpp"

using namespace nmqj;

TEST_CASE("jump probabilities") {
    const StateVector v = normalize(StateVector{3.0, 2.0});
    const auto c = Matrix::transition(2, 1, 0);
    CHECK(positive_jump_probability(v, c, 2.0, 0.01) == doctest::Approx(0.02 * 9.0 / 13.0));
    CHECK_THROWS_AS(positive_jump_probability(v, c, -1.0, 0.01), InvalidParameter);
    CHECK_THROWS_AS(positive_jump_probability(v, c, 50.0, 0.01), StepTooLarge);
}

TEST_CASE("reverse jump probability scales with the target count") {
    const auto jc = build_jaynes_cummings();
    EnsembleRegistry reg(jc.initial_state, 60);
    const auto b = reg.add(StateVector::basis(2, 1), 40);
    reg.rebuild_connectivity(jc);
    const auto targets = reg.reverse_targets(0, b);
    REQUIRE(targets.size() == 1);
    CHECK(targets[0] == 0);
    const double p = reverse_jump_probability(reg, b, 0, jc.channels[0].jump, -1.5, 0.01);
    CHECK(p == doctest::Approx(60.0 / 40.0 * 1.5 * 0.01 * 9.0 / 13.0));

    reg.transfer(0, b, 60);
    CHECK(reverse_jump_probability(reg, b, 0, jc.channels[0].jump, -1.5, 0.01) == 0.0);
    reg.transfer(b, 0, 100);
    CHECK_THROWS_AS(reverse_jump_probability(reg, b, 0, jc.channels[0].jump, -1.5, 0.01),
                    SourceEmpty);
}

TEST_CASE("ladder mixed start has two reverse targets for the bottom state") {
    const auto m = build_ladder(LadderStart::Mixed);
    EnsembleRegistry reg(m.initial_state, 50);
    reg.add(StateVector::basis(3, 1), 30);
    const auto c = reg.add(StateVector::basis(3, 2), 20);
    reg.rebuild_connectivity(m);
    CHECK(reg.reverse_targets(1, c).size() == 2);
}

TEST_CASE("duplicates merge into the earliest entry") {
    EnsembleRegistry reg(StateVector{1.0, 0.0}, 5);
    reg.add(StateVector{0.0, 1.0}, 3);
    reg.add(StateVector{Complex{0.0, 1.0}, 0.0}, 2);
    reg.merge_duplicates();
    CHECK(reg.entry(0).count == 7);
    CHECK(reg.entry(2).retired);
    CHECK(reg.active_count() == 2);
    CHECK(reg.count_sum() == 10);
}

TEST_CASE("deterministic step matches the no-jump evolution") {
    const auto jc = build_jaynes_cummings();
    const auto& rate = *jc.channels[0].rate;
    StateVector v = jc.initial_state;
    const double dt = 1e-4;
    double t = 0.0;
    for (int k = 0; k < 10000; ++k) {
        v = deterministic_step(v, t, jc, dt);
        t += dt;
    }
    // amplitude ratio a/b decays as exp(-D/2)
    const double expected = 1.5 * std::exp(-0.5 * rate.accumulated_decay(1.0));
    CHECK(std::abs(v[0] / v[1]) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("engine conserves members and records a full series") {
    EngineConfig cfg;
    cfg.ensemble_size = 5000;
    cfg.t_max = 2.0;
    cfg.rng_seed = 11;
    NmqjEngine engine(build_ladder(LadderStart::Mixed), cfg);
    while (!engine.finished()) {
        const auto out = engine.advance();
        std::int64_t sum = 0;
        for (auto n : out.counts_after) sum += n;
        REQUIRE(sum == 5000);
    }
    NmqjEngine fresh(build_ladder(LadderStart::Mixed), cfg);
    const auto res = fresh.run();
    CHECK(res.series.size() == 21);
    CHECK(res.series.times.back() == doctest::Approx(2.0));
    CHECK(res.effective_sizes.front() == 1);
    for (const auto& row : res.series.counts) {
        CHECK(row.size() == res.series.counts.back().size());
    }
}

TEST_CASE("streams depend only on seed and entry index") {
    RngStreams a(5), b(5);
    auto x = a.stream(3)();
    (void)b.stream(0)();
    CHECK(b.stream(3)() == x);
}

TEST_CASE("one-step average is second order") {
    const auto jc = build_jaynes_cummings();
    EnsembleRegistry reg(jc.initial_state, 100);
    reg.add(StateVector::basis(2, 1), 40);
    reg.rebuild_connectivity(jc);
    const double r1 = one_step_average_check(reg, 0.94, jc, 0.01);
    const double r2 = one_step_average_check(reg, 0.94, jc, 0.005);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("config validation") {
    EngineConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
