#include <doctest.h>

#include <cmath>
#include <complex>

#include "cascade/popstate.hpp"
#include "test_helpers.hpp"

using namespace cascade;
using test_util::max_abs_diff;

namespace {

DensityMatrix4::Matrix zero_matrix() {
    return DensityMatrix4::Matrix{};
}

} // namespace

TEST_CASE("pure_state places all probability on the occupation bitstring") {
    CHECK(PopulationVector::pure_state(1, "1").probs() == std::vector<double>{0.0, 1.0});
    CHECK(PopulationVector::pure_state(2, "10").probs() ==
          std::vector<double>{0.0, 0.0, 1.0, 0.0});
    CHECK(PopulationVector::pure_state(2, "00").probs() ==
          std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("pure_state validates the bitstring") {
    CHECK_THROWS_AS(PopulationVector::pure_state(2, "1"), std::invalid_argument);
    CHECK_THROWS_AS(PopulationVector::pure_state(2, "12"), std::invalid_argument);
}

TEST_CASE("construction rejects invalid distributions") {
    CHECK_THROWS_AS(PopulationVector(1, {0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(PopulationVector(1, {1.5, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(PopulationVector(2, {1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(PopulationVector(0, {1.0}), std::invalid_argument);
}

TEST_CASE("tensor follows the product rule with a in the low bits") {
    const PopulationVector vac(1, {1.0, 0.0});
    const PopulationVector photon(1, {0.0, 1.0});
    const PopulationVector half(1, {0.5, 0.5});

    CHECK(tensor(vac, vac).probs() == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    CHECK(tensor(photon, half).probs() == std::vector<double>{0.0, 0.5, 0.0, 0.5});
    const auto uniform4 = tensor(half, half);
    for (int i = 0; i < 4; ++i) CHECK(uniform4[i] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("marginalize sums out the discarded modes") {
    const PopulationVector correlated(2, {0.5, 0.0, 0.0, 0.5});
    CHECK(marginalize(correlated, {0}).probs() == std::vector<double>{0.5, 0.5});
    CHECK(marginalize(PopulationVector(2, {1.0, 0.0, 0.0, 0.0}), {1}).probs() ==
          std::vector<double>{1.0, 0.0});

    CHECK_THROWS_AS(marginalize(correlated, {}), std::invalid_argument);
    CHECK_THROWS_AS(marginalize(correlated, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(marginalize(correlated, {2}), std::invalid_argument);
}

TEST_CASE("tensor then marginalize recovers each factor") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = test_util::random_population(gen, 2);
        const auto b = test_util::random_population(gen, 1);
        const auto joint = tensor(a, b);
        CHECK(max_abs_diff(marginalize(joint, {0, 1}).probs(), a.probs()) <= 1e-12);
        CHECK(max_abs_diff(marginalize(joint, {2}).probs(), b.probs()) <= 1e-12);

        double sum = 0.0;
        for (double v : joint.probs()) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("density matrix diagonal extraction") {
    SUBCASE("maximally mixed") {
        auto m = zero_matrix();
        for (int i = 0; i < 4; ++i) m[i][i] = 0.25;
        const auto diag = diagonal_of(DensityMatrix4(m));
        for (int i = 0; i < 4; ++i) CHECK(diag[i] == 0.25);
    }
    SUBCASE("basis projector |11><11|") {
        auto m = zero_matrix();
        m[3][3] = 1.0;
        CHECK(diagonal_of(DensityMatrix4(m)).probs() == std::vector<double>{0, 0, 0, 1});
    }
    SUBCASE("maximally correlated photon-vacuum state") {
        auto m = zero_matrix();
        m[0][0] = m[0][3] = m[3][0] = m[3][3] = 0.5;
        const auto diag = diagonal_of(DensityMatrix4(m));
        CHECK(diag.probs() == std::vector<double>{0.5, 0.0, 0.0, 0.5});
    }
    SUBCASE("slightly negative diagonal within tolerance clamps to zero") {
        auto m = zero_matrix();
        m[0][0] = 1.0 + 5e-10;
        m[1][1] = -5e-10;
        const auto diag = diagonal_of(DensityMatrix4(m));
        CHECK(diag[1] == 0.0);
    }
}

TEST_CASE("density matrix validation") {
    SUBCASE("non-Hermitian rejected") {
        auto m = zero_matrix();
        m[0][0] = 1.0;
        m[0][1] = {0.1, 0.0};
        m[1][0] = {0.2, 0.0};
        CHECK_THROWS_AS(DensityMatrix4{m}, std::invalid_argument);
    }
    SUBCASE("wrong trace rejected") {
        auto m = zero_matrix();
        m[0][0] = 0.7;
        CHECK_THROWS_AS(DensityMatrix4{m}, std::invalid_argument);
    }
    SUBCASE("negative eigenvalue rejected") {
        // Hermitian, unit trace, but |01><10| weight makes it indefinite.
        auto m = zero_matrix();
        m[0][0] = 0.5;
        m[1][1] = 0.5;
        m[0][1] = m[1][0] = 0.7;
        CHECK_THROWS_AS(DensityMatrix4{m}, std::invalid_argument);
    }
    SUBCASE("unit trace gives unit-sum diagonal") {
        auto m = zero_matrix();
        m[0][0] = 0.3;
        m[1][1] = 0.2;
        m[2][2] = 0.1;
        m[3][3] = 0.4;
        m[0][3] = m[3][0] = 0.25;
        const auto diag = diagonal_of(DensityMatrix4(m));
        double sum = 0.0;
        for (double v : diag.probs()) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}
