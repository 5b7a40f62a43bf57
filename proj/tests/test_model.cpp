#include <catch_amalgamated.hpp>

#include <random>

#include "kgq/model.hpp"

using namespace kgq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("potential evaluation on explicit modes") {
    const double eps = 1e-3;
    QuasiPeriodicPotential P;
    P.coeffs = {{{1}, eps}, {{-1}, eps}, {{2}, eps / 2}, {{-2}, eps / 2}};
    P.validate();
    CHECK_THAT(eval_potential(P, {0.25}), WithinAbs(0.999, 1e-15));
    CHECK_THAT(eval_potential(P, {0.0}), WithinAbs(1.0 + 3 * eps, 1e-15));
}

TEST_CASE("zero potential is the constant 1") {
    auto P = QuasiPeriodicPotential::zero();
    CHECK(P.is_zero());
    CHECK(eval_potential(P, {0.37}) == 1.0);
    CHECK(strip_norm(P) == 0.0);
}

TEST_CASE("potential is 1-periodic and even for symmetric coefficients") {
    auto P = QuasiPeriodicPotential::cosine(0.2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        double th = u(rng);
        CHECK_THAT(potential_P(P, {th + 1.0}), WithinAbs(potential_P(P, {th}), 1e-13));
        CHECK_THAT(potential_P(P, {-th}), WithinAbs(potential_P(P, {th}), 1e-13));
        CHECK(std::abs(potential_P(P, {th})) <= 0.2 + 1e-15);
    }
}

TEST_CASE("strip norm weights each mode by exp(2 pi |k| r)") {
    auto P = QuasiPeriodicPotential::cosine(1e-3, 1, 0.01);
    CHECK_THAT(strip_norm(P), WithinRel(1e-3 * std::exp(2 * pi * 0.01), 1e-14));
}

TEST_CASE("asymmetric coefficients and mismatched dimensions are rejected") {
    QuasiPeriodicPotential P;
    P.coeffs = {{{1}, 0.1}, {{-1}, 0.2}};
    CHECK_THROWS_AS(P.validate(), ValidationError);
    auto Q = QuasiPeriodicPotential::cosine(0.1);
    CHECK_THROWS_AS(potential_P(Q, {0.1, 0.2}), ValidationError);
}

TEST_CASE("orbit points stay in [0,1)") {
    auto w = golden_frequency();
    for (long long n : {-100000LL, -7LL, 0LL, 5LL, 123456789LL}) {
        auto th = orbit_point({0.3}, w.omega, n);
        CHECK(th[0] >= 0.0);
        CHECK(th[0] < 1.0);
    }
    CHECK_THAT(orbit_point({0.0}, w.omega, 1)[0], WithinAbs(0.6180339887498949, 1e-15));
}

TEST_CASE("golden mean Diophantine check") {
    auto w = golden_frequency(0.1, 1.5);
    w.validate();
    auto rep = check_diophantine(w, 20);
    CHECK(rep.pass);
    // worst margin from a 30-digit scan of n = 1..20
    CHECK(rep.worst_n == IVec{1});
    CHECK_THAT(rep.worst_distance, WithinAbs(0.3819660112501051, 1e-14));
    CHECK_THAT(rep.worst_margin, WithinAbs(2.819660112501051, 1e-12));
}

TEST_CASE("rational frequency fails the Diophantine check") {
    FrequencyVector w{{0.5}, 0.1, 1.5};
    auto rep = check_diophantine(w, 10);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_distance == 0.0);
}

TEST_CASE("two-frequency vector passes with a small gamma") {
    FrequencyVector w{{(std::sqrt(5.0) - 1) / 2, std::sqrt(2.0) - 1}, 1e-3, 2.5};
    w.validate();
    CHECK(check_diophantine(w, 8).pass);
}

TEST_CASE("frequency validation") {
    CHECK_THROWS_AS((FrequencyVector{{}, 0.1, 1.5}.validate()), ValidationError);
    CHECK_THROWS_AS((FrequencyVector{{1.2}, 0.1, 1.5}.validate()), ValidationError);
    CHECK_THROWS_AS((FrequencyVector{{0.3}, 0.0, 1.5}.validate()), ValidationError);
    CHECK_THROWS_AS((FrequencyVector{{0.3, 0.4}, 0.1, 0.5}.validate()), ValidationError);
}
