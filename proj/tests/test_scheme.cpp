#include <doctest.h>

#include <cmath>
#include <random>

#include "cascade/metrics.hpp"
#include "cascade/scheme.hpp"
#include "test_helpers.hpp"

using namespace cascade;
using test_util::max_abs_diff;
using test_util::unit;

namespace {

SchemeConfig wz_config(int layers, double eps, double mu, double eta, double xi, double p) {
    return SchemeConfig(layers, NoisyWZ(eps, mu), DetectorModel(eta, xi), p);
}

} // namespace

TEST_CASE("bare detector table") {
    const auto t = build_outcome_table(wz_config(0, 1.0, -1.0, 0.6, 0.0, 0.5));
    CHECK(t.p_given_photon() == std::vector<double>{0.4, 0.6});
    CHECK(t.p_given_vacuum() == std::vector<double>{1.0, 0.0});
}

TEST_CASE("one perfect copier splits the photon across two detectors") {
    const double eta = 0.37;
    const auto t = build_outcome_table(wz_config(1, 1.0, -1.0, eta, 0.0, 0.5));
    CHECK(t.p_given_photon()[3] == doctest::Approx(eta * eta).epsilon(1e-14));
    CHECK(t.p_given_photon()[1] == doctest::Approx(eta * (1 - eta)).epsilon(1e-14));
    CHECK(t.p_given_photon()[2] == doctest::Approx(eta * (1 - eta)).epsilon(1e-14));
    CHECK(t.p_given_photon()[0] == doctest::Approx((1 - eta) * (1 - eta)).epsilon(1e-14));
    CHECK(t.p_given_vacuum()[0] == 1.0);
}

TEST_CASE("one noisy copier reproduces the closed-form outcome set") {
    const double eps = 0.8, eta = 0.6, xi = 0.01;
    const auto t = build_outcome_table(wz_config(1, eps, -1.0, eta, xi, 0.5));

    const double pp1 = eta * eta * (eps + (1 - eps) * xi * xi);
    const double mm1 = eps * (1 - eta) * (1 - eta) + (1 - eps) * (1 - eta * xi) * (1 - eta * xi);
    const double pm1 = eps * eta * (1 - eta) + (1 - eps) * eta * xi * (1 - eta * xi);
    const double pp0 = eta * eta * xi * xi;
    const double mm0 = (1 - eta * xi) * (1 - eta * xi);
    const double pm0 = eta * xi * (1 - eta * xi);

    CHECK(t.p_given_photon()[3] == doctest::Approx(pp1).epsilon(1e-14));
    CHECK(t.p_given_photon()[0] == doctest::Approx(mm1).epsilon(1e-14));
    CHECK(t.p_given_photon()[1] == doctest::Approx(pm1).epsilon(1e-14));
    CHECK(t.p_given_photon()[2] == doctest::Approx(pm1).epsilon(1e-14));
    CHECK(t.p_given_vacuum()[3] == doctest::Approx(pp0).epsilon(1e-14));
    CHECK(t.p_given_vacuum()[0] == doctest::Approx(mm0).epsilon(1e-14));
    CHECK(t.p_given_vacuum()[1] == doctest::Approx(pm0).epsilon(1e-14));

    // Frozen spot values for this configuration.
    CHECK(t.p_given_photon()[3] == doctest::Approx(0.2880072).epsilon(1e-12));
    CHECK(t.p_given_photon()[0] == doctest::Approx(0.3256072).epsilon(1e-12));
    CHECK(t.p_given_vacuum()[0] == doctest::Approx(0.988036).epsilon(1e-12));
}

TEST_CASE("classical copier scheme reproduces the closed form") {
    const double eta = 0.6;
    const SchemeConfig cfg(1, ClassicalCopier{DetectorModel(eta, 0.0)}, DetectorModel(eta, 0.0),
                           0.5);
    const auto t = build_outcome_table(cfg);
    CHECK(1.0 - t.p_given_photon()[0] ==
          doctest::Approx(classical_copier_count_prob(eta)).epsilon(1e-14));
}

TEST_CASE("idealized closed forms match table aggregates") {
    SUBCASE("N = 1 closed forms") {
        const double eta = 0.6, p = 0.3;
        const auto s = simple_scheme_probs(eta, 1, p);
        CHECK(s.p_count_given_photon == doctest::Approx(eta + (1 - eta) * eta).epsilon(1e-15));
        CHECK(s.p_nophoton_given_nocount ==
              doctest::Approx((1 - p) / (1 - eta * p * (2 - eta))).epsilon(1e-14));
    }
    SUBCASE("N = 2 brute force") {
        const auto t = build_outcome_table(wz_config(2, 1.0, -1.0, 0.5, 0.0, 0.5));
        const double count_given_photon = 1.0 - t.p_given_photon()[0];
        CHECK(count_given_photon == doctest::Approx(0.9375).epsilon(1e-15));
        CHECK(simple_scheme_probs(0.5, 2, 0.5).p_count_given_photon ==
              doctest::Approx(count_given_photon).epsilon(1e-15));
    }
    SUBCASE("aggregates over a parameter grid, N = 1..3") {
        for (int layers = 1; layers <= 3; ++layers) {
            for (double eta : {0.1, 0.35, 0.6, 0.9}) {
                for (double p : {0.1, 0.5, 0.9}) {
                    const auto t = build_outcome_table(wz_config(layers, 1.0, -1.0, eta, 0.0, p));
                    const auto s = simple_scheme_probs(eta, layers, p);
                    const double count = 1.0 - t.p_given_photon()[0];
                    const double nofalse = (1 - p) * t.p_given_vacuum()[0];
                    const double nocount = nofalse + p * t.p_given_photon()[0];
                    CHECK(std::abs(s.p_count_given_photon - count) <= 1e-12);
                    CHECK(std::abs(s.p_nophoton_given_nocount - nofalse / nocount) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("sampling: deterministic chain") {
    const auto r = sample_outcomes(wz_config(1, 1.0, -1.0, 1.0, 0.0, 1.0), 5000, 123);
    CHECK(r.photon_trials() == 5000);
    CHECK(r.counts_given_photon[3] == 5000);
}

TEST_CASE("sampling: fixed seed reproduces the stream") {
    const auto cfg = wz_config(2, 0.8, -0.5, 0.55, 0.02, 0.4);
    const auto a = sample_outcomes(cfg, 20000, 99);
    const auto b = sample_outcomes(cfg, 20000, 99);
    CHECK(a.inputs == b.inputs);
    CHECK(a.counts_given_photon == b.counts_given_photon);
    CHECK(a.counts_given_vacuum == b.counts_given_vacuum);
    CHECK(a.inputs.size() == 20000);

    std::uint64_t photons = 0;
    for (auto v : a.inputs) photons += v;
    CHECK(photons == a.photon_trials());
}

TEST_CASE("sampling: empirical frequencies meet the binomial bound") {
    const auto cfg = wz_config(1, 0.8, -1.0, 0.6, 0.01, 0.5);
    const auto exact = build_outcome_table(cfg);
    const auto sample = sample_outcomes(cfg, 200000, 0);

    auto check_row = [](const std::vector<double>& probs, const std::vector<std::uint64_t>& counts,
                        std::uint64_t n) {
        for (std::size_t j = 0; j < probs.size(); ++j) {
            const double freq = static_cast<double>(counts[j]) / static_cast<double>(n);
            const double bound = 4.0 * std::sqrt(probs[j] * (1.0 - probs[j]) / n);
            CHECK(std::abs(freq - probs[j]) <= bound);
        }
    };
    check_row(exact.p_given_photon(), sample.counts_given_photon, sample.photon_trials());
    check_row(exact.p_given_vacuum(), sample.counts_given_vacuum, sample.vacuum_trials());

    const auto table = sample.empirical_table();
    CHECK(table.layers() == 1);
}

TEST_CASE("sampling validation") {
    CHECK_THROWS_AS(sample_outcomes(wz_config(1, 1, -1, 1, 0, 0.5), 0, 0), std::invalid_argument);
}

TEST_CASE("cnot oracle: entangling action on the photon-vacuum superposition") {
    DensityMatrix2 plus{{{0.5, 0.5}, {0.5, 0.5}}};
    const auto r = cnot_oracle(plus, DetectorModel(0.6, 0.0));
    const auto populations = diagonal_of(r.state_after_copier);
    CHECK(populations[0] == 0.5);
    CHECK(populations[1] == 0.0);
    CHECK(populations[2] == 0.0);
    CHECK(populations[3] == 0.5);
}

TEST_CASE("cnot oracle: basis inputs") {
    DensityMatrix2 photon{{{0.0, 0.0}, {0.0, 1.0}}};
    const auto r = cnot_oracle(photon, DetectorModel(0.6, 0.0));
    CHECK(r.outcome_probs[3] == doctest::Approx(0.36).epsilon(1e-14));
    CHECK(r.outcome_probs[1] == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(r.outcome_probs[2] == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(r.outcome_probs[0] == doctest::Approx(0.16).epsilon(1e-14));

    DensityMatrix2 vacuum{{{1.0, 0.0}, {0.0, 0.0}}};
    const auto v = cnot_oracle(vacuum, DetectorModel(0.77, 0.0));
    CHECK(v.outcome_probs[0] == 1.0);
}

TEST_CASE("cnot oracle rejects unphysical inputs") {
    DensityMatrix2 bad_trace{{{0.6, 0.0}, {0.0, 0.6}}};
    CHECK_THROWS_AS(cnot_oracle(bad_trace, DetectorModel(0.5, 0.0)), std::invalid_argument);
    DensityMatrix2 indefinite{{{0.5, 0.9}, {0.9, 0.5}}};
    CHECK_THROWS_AS(cnot_oracle(indefinite, DetectorModel(0.5, 0.0)), std::invalid_argument);
    DensityMatrix2 non_hermitian{{{0.5, 0.1}, {0.3, 0.5}}};
    CHECK_THROWS_AS(cnot_oracle(non_hermitian, DetectorModel(0.5, 0.0)), std::invalid_argument);
}

TEST_CASE("cnot oracle agrees with the exact table on diagonal inputs") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 40; ++trial) {
        const double q = unit(gen);
        const double eta = unit(gen);
        const double xi = 0.9 * unit(gen);
        const DetectorModel detector(eta, xi);
        DensityMatrix2 mixed{{{1.0 - q, 0.0}, {0.0, q}}};
        const auto oracle = cnot_oracle(mixed, detector);
        const auto table = build_outcome_table(SchemeConfig(1, NoisyWZ(1.0, -1.0), detector, q));
        for (int j = 0; j < 4; ++j) {
            const double expected =
                q * table.p_given_photon()[j] + (1.0 - q) * table.p_given_vacuum()[j];
            CHECK(std::abs(oracle.outcome_probs[j] - expected) <= 1e-12);
        }
    }
}

TEST_CASE("detector-swap symmetry at every layer (N = 2)") {
    const auto t = build_outcome_table(wz_config(2, 0.7, 0.4, 0.6, 0.03, 0.5));
    // Swapping the two outputs of any copier permutes detector indices:
    // second-layer swaps exchange bits (0,1) or (2,3); the first-layer swap
    // exchanges the pairs.
    auto swap_bits = [](std::size_t o, int a, int b) {
        const std::size_t ba = (o >> a) & 1u;
        const std::size_t bb = (o >> b) & 1u;
        o &= ~((std::size_t{1} << a) | (std::size_t{1} << b));
        return o | (ba << b) | (bb << a);
    };
    for (const auto& row : {t.p_given_photon(), t.p_given_vacuum()}) {
        for (std::size_t o = 0; o < row.size(); ++o) {
            CHECK(row[o] == doctest::Approx(row[swap_bits(o, 0, 1)]).epsilon(1e-12));
            CHECK(row[o] == doctest::Approx(row[swap_bits(o, 2, 3)]).epsilon(1e-12));
            CHECK(row[o] ==
                  doctest::Approx(row[swap_bits(swap_bits(o, 0, 2), 1, 3)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("without dark counts, silence favors vacuum") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 20; ++trial) {
        const int layers = 1 + static_cast<int>(unit(gen) * 3);
        const double eps = unit(gen);
        const double eta = unit(gen);
        // Vacuum-on-failure copier: a vacuum input can never produce a click.
        const auto quiet = build_outcome_table(wz_config(layers, eps, -1.0, eta, 0.0, 0.5));
        CHECK(quiet.p_given_vacuum()[0] == 1.0);
        CHECK(quiet.p_given_photon()[0] <= 1.0);

        // Dominance holds for every failure output.
        const auto noisy =
            build_outcome_table(wz_config(layers, eps, 2 * unit(gen) - 1, eta, 0.0, 0.5));
        CHECK(noisy.p_given_photon()[0] <= noisy.p_given_vacuum()[0] + 1e-12);
    }
}

TEST_CASE("outcome rows are normalized for deep cascades") {
    const auto t = build_outcome_table(wz_config(4, 0.75, -0.2, 0.45, 0.05, 0.5));
    CHECK(t.outcomes() == 65536);
    for (const auto& row : {t.p_given_photon(), t.p_given_vacuum()}) {
        double sum = 0.0;
        for (double v : row) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("layer count is capped") {
    CHECK_THROWS_AS(wz_config(5, 1.0, -1.0, 0.5, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(wz_config(-1, 1.0, -1.0, 0.5, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("outcome table JSON round trip") {
    const auto t = build_outcome_table(wz_config(1, 0.8, -1.0, 0.6, 0.01, 0.5));
    const auto j = outcome_table_to_json(t);
    CHECK(j.at("layers") == 1);
    const auto back = outcome_table_from_json(j);
    CHECK(back.p_given_photon() == t.p_given_photon());
    CHECK(back.p_given_vacuum() == t.p_given_vacuum());
}
