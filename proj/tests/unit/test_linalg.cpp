#include <doctest.h>

#include <cmath>

#include "nmqj/errors.hpp"
#include "nmqj/linalg.hpp"

using namespace nmqj;

TEST_CASE("normalize and zero vectors") {
    StateVector v{3.0, 4.0};
    const auto n = normalize(v);
    CHECK(n.norm() == doctest::Approx(1.0));
    CHECK(n[0].real() == doctest::Approx(0.6));
    CHECK_THROWS_AS(normalize(StateVector(2)), ZeroNorm);
}

TEST_CASE("transition operators and products") {
    const auto c = Matrix::transition(2, 1, 0);  // |b><a|
    const auto cdc = c.adjoint() * c;
    CHECK(cdc(0, 0).real() == 1.0);
    CHECK(cdc(1, 1).real() == 0.0);
    const auto v = c * StateVector{0.6, 0.8};
    CHECK(v[0] == Complex{0.0, 0.0});
    CHECK(v[1].real() == doctest::Approx(0.6));
    CHECK(max_abs_diff(commutator(cdc, cdc), Matrix(2)) == 0.0);
}

TEST_CASE("phase equality ignores a global phase") {
    const StateVector u{0.6, 0.8};
    const StateVector w = std::polar(1.0, 1.3) * u;
    CHECK(phase_equal(u, w, kPhaseTolerance));
    CHECK_FALSE(phase_equal(u, StateVector{0.8, 0.6}, kPhaseTolerance));
}

TEST_CASE("minimum eigenvalue") {
    DensityMatrix r2(2);
    r2(0, 0) = 0.7;
    r2(1, 1) = 0.3;
    r2(0, 1) = Complex{0.1, 0.2};
    r2(1, 0) = std::conj(r2(0, 1));
    CHECK(min_eigenvalue(r2) == doctest::Approx(0.2).epsilon(1e-12));

    DensityMatrix r3(3);
    r3(0, 0) = 0.5;
    r3(1, 1) = 0.6;
    r3(2, 2) = -0.1;
    CHECK(min_eigenvalue(r3) == doctest::Approx(-0.1).epsilon(1e-12));

    // Pure state plus a small admixture: eigenvalues known exactly.
    const StateVector psi = normalize(StateVector{Complex{1, 1}, 2.0, Complex{0, -1}, 0.5});
    DensityMatrix r4 = 0.9 * outer(psi) + 0.025 * Matrix::identity(4);
    CHECK(min_eigenvalue(r4) == doctest::Approx(0.025).epsilon(1e-10));

    DensityMatrix bad(2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(min_eigenvalue(bad), NotHermitian);
}

TEST_CASE("expectation and outer products") {
    const StateVector v = normalize(StateVector{3.0, 2.0});
    const auto rho = outer(v);
    CHECK(rho.trace().real() == doctest::Approx(1.0));
    CHECK(rho(0, 1).real() == doctest::Approx(6.0 / 13.0));
    CHECK(expectation(v, Matrix::transition(2, 0, 0)).real() == doctest::Approx(9.0 / 13.0));
}
