#include <catch_amalgamated.hpp>

#include "kgq/cocycle.hpp"

using namespace kgq;
using Catch::Matchers::WithinAbs;

TEST_CASE("transfer matrices are unimodular") {
    auto P = QuasiPeriodicPotential::cosine(0.3);
    for (double E : {-2.5, 0.0, 1.3})
        for (double th : {0.0, 0.17, 0.8}) CHECK_THAT(transfer_matrix(E, P, {th}).determinant(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("renormalized product equals the direct product") {
    auto P = QuasiPeriodicPotential::cosine(0.2);
    auto w = golden_frequency();
    const double E = 2.7;  // outside the spectrum: the product grows
    Mat2 M = Mat2::Identity();
    for (int j = 0; j < 100; ++j) M = transfer_matrix(E, P, orbit_point({0.1}, w.omega, j)) * M;
    Mat2 R = product_matrix(iterate(E, P, w, {0.1}, 100));
    CHECK(((R - M).cwiseAbs().maxCoeff() / M.norm()) < 1e-13);
    CHECK(product_matrix(iterate(E, P, w, {0.1}, 0)) == Mat2::Identity());
}

TEST_CASE("free rotation number is arccos(-E/2)") {
    auto P = QuasiPeriodicPotential::zero();
    auto w = golden_frequency();
    for (double E : {-1.9, -1.0, 0.0, 0.5, 1.7}) {
        double exact = std::acos(-E / 2);
        CHECK_THAT(rotation_number(E, P, w, {0.0}, 20000), WithinAbs(exact, 2e-4));
    }
    CHECK(rotation_number(-2.5, P, w, {0.0}, 1000) < 1e-2);
    CHECK(rotation_number(2.5, P, w, {0.0}, 1000) > pi - 1e-2);
}

TEST_CASE("free Lyapunov exponent") {
    auto P = QuasiPeriodicPotential::zero();
    auto w = golden_frequency();
    // arccosh(3/2), 30-digit reference
    CHECK_THAT(lyapunov_exponent(3.0, P, w, {0.0}, 100000), WithinAbs(0.9624236501192069, 1e-4));
    CHECK(lyapunov_exponent(0.5, P, w, {0.0}, 100000) < 1e-4);
}

TEST_CASE("rotation number is monotone in E for a perturbed potential") {
    auto P = QuasiPeriodicPotential::cosine(0.1);
    auto w = golden_frequency();
    double prev = -1.0;
    for (int i = 0; i <= 40; ++i) {
        double E = -2.3 + 4.6 * i / 40;
        double r = rotation_number(E, P, w, {0.0}, 20000);
        CHECK(r >= prev - 1e-3);
        CHECK(r >= 0.0);
        CHECK(r <= pi);
        prev = r;
    }
}

TEST_CASE("rotation number does not depend on theta0") {
    auto P = QuasiPeriodicPotential::cosine(0.1);
    auto w = golden_frequency();
    double a = rotation_number(0.3, P, w, {0.0}, 50000);
    double b = rotation_number(0.3, P, w, {0.41}, 50000);
    CHECK_THAT(a, WithinAbs(b, 1e-3));
}

TEST_CASE("iteration counts are validated") {
    auto P = QuasiPeriodicPotential::zero();
    CHECK_THROWS_AS(rotation_number(0.0, P, golden_frequency(), {0.0}, 0), ValidationError);
    CHECK_THROWS_AS(iterate(0.0, P, golden_frequency(), {0.0}, -1), ValidationError);
}
