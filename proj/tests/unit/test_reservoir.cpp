#include <doctest.h>

#include <cmath>

#include "nmqj/errors.hpp"
#include "nmqj/reservoir.hpp"

using namespace nmqj;

namespace {

struct Reference {
    double detuning, coupling, t, decay, lamb;
};

// Fourier-weighted quadrature over the whole frequency axis, then over s.
const Reference kReference[] = {
    {5.0, 5.0, 0.5, 1.2445221821557324, 1.5617051660328216},
    {5.0, 5.0, 1.0, -0.9877662458897927, 0.8773384998099516},
    {5.0, 5.0, 2.5, 0.10378427513596314, 0.708936792959695},
    {-3.0, 2.0, 0.5, 1.2121100696240306, -0.5289307021639396},
    {-3.0, 2.0, 1.0, 0.4570859398047237, -1.0288833730653566},
    {-3.0, 2.0, 2.5, 0.543380816320728, -0.5551764777593449},
};

}  // namespace

TEST_CASE("closed-form rates match frozen full-axis quadrature") {
    for (const auto& r : kReference) {
        const LorentzianChannelRate rate(LorentzianReservoir(r.coupling), r.detuning);
        CHECK(rate.decay_rate(r.t) == doctest::Approx(r.decay).epsilon(1e-9));
        CHECK(rate.lamb_shift_rate(r.t) == doctest::Approx(r.lamb).epsilon(1e-9));
    }
}

TEST_CASE("long-time limits") {
    const LorentzianChannelRate rate(LorentzianReservoir(5.0), 5.0);
    CHECK(rate.markov_decay_rate() == doctest::Approx(0.19801980198019803).epsilon(1e-14));
    CHECK(rate.markov_lamb_shift_rate() == doctest::Approx(0.99009900990099).epsilon(1e-14));
    CHECK(rate.decay_rate(60.0) == doctest::Approx(rate.markov_decay_rate()).epsilon(1e-10));
    CHECK(rate.decay_rate(0.0) == 0.0);
    CHECK(rate.lamb_shift_rate(0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("accumulated rates agree with adaptive quadrature") {
    const LorentzianChannelRate rate(LorentzianReservoir(2.0), -3.0);
    for (double t : {0.3, 1.7, 4.0}) {
        CHECK(rate.accumulated_decay(t) ==
              doctest::Approx(accumulated_rate(rate, RateKind::Decay, t)).epsilon(1e-8));
        CHECK(rate.accumulated_lamb_shift(t) ==
              doctest::Approx(accumulated_rate(rate, RateKind::LambShift, t)).epsilon(1e-8));
    }
}

TEST_CASE("windowed quadrature tracks the closed form") {
    const LorentzianReservoir res(5.0);
    const LorentzianChannelRate closed(res, 5.0);
    const auto quad = QuadratureChannelRate::lorentzian(res, 5.0);
    const double times[] = {0.4, 1.1, 2.0};
    const auto d = quad.decay_rate(times);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(d[k] - closed.decay_rate(times[k])) < 2e-4);
    }
}

TEST_CASE("rate table and constant rates") {
    std::vector<std::shared_ptr<const ChannelRate>> ch = {
        std::make_shared<ConstantChannelRate>(0.7, 0.1)};
    const RateTable table(ch, 0.01, 10);
    CHECK(table.decay(0, 10) == 0.7);
    CHECK(table.lamb_shift(0, 3) == 0.1);
    CHECK(ch[0]->accumulated_decay(2.0) == doctest::Approx(1.4));
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(LorentzianReservoir(-1.0), InvalidParameter);
    const LorentzianChannelRate rate(LorentzianReservoir(1.0), 1.0);
    CHECK_THROWS_AS(rate.decay_rate(-0.1), NegativeTime);
}
