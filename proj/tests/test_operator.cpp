#include <catch_amalgamated.hpp>

#include "kgq/operator.hpp"

using namespace kgq;
using Catch::Matchers::WithinAbs;

TEST_CASE("free finite section has the Dirichlet spectrum") {
    const int N = 64;
    auto D = eigendecompose(build_finite_section(QuasiPeriodicPotential::zero(), golden_frequency(),
                                                 LatticeConfig::centered(N)));
    for (int k = 1; k <= N; ++k) CHECK_THAT(D.eigenvalues[k - 1], WithinAbs(-2 * std::cos(k * pi / (N + 1)), 1e-13));
    // eigenvectors are sqrt(2/(N+1)) sin(j k pi/(N+1)) up to sign
    for (int k = 1; k <= N; k += 9)
        for (int j = 1; j <= N; j += 7)
            CHECK_THAT(std::abs(D.eigenvectors(j - 1, k - 1)),
                       WithinAbs(std::abs(std::sqrt(2.0 / (N + 1)) * std::sin(j * k * pi / (N + 1))), 1e-12));
}

TEST_CASE("perturbed finite section matches a reference tridiagonal solver") {
    auto H = build_finite_section(QuasiPeriodicPotential::cosine(0.1), golden_frequency(), LatticeConfig::centered(8));
    // scipy eigh_tridiagonal on the same diagonal
    const double ref_diag[] = {-0.09847134853154288, 0.06084388609788625, 0.008742572471695988, -0.07373688780783198,
                               0.1, -0.07373688780783198, 0.008742572471695968, 0.06084388609788623};
    const double ref_eig[] = {-1.8806853451511092, -1.5323438201886064, -0.9951749217413925, -0.3596982925118102,
                              0.33063442028968315, 1.0142215710284312,  1.5350943317893644,  1.881179849477406};
    for (int i = 0; i < 8; ++i) CHECK_THAT(H.diagonal[i], WithinAbs(ref_diag[i], 1e-14));
    auto D = eigendecompose(H);
    for (int i = 0; i < 8; ++i) CHECK_THAT(D.eigenvalues[i], WithinAbs(ref_eig[i], 1e-13));
}

TEST_CASE("eigendecomposition is orthonormal and diagonalizes H") {
    auto H = build_finite_section(QuasiPeriodicPotential::cosine(0.3), golden_frequency(), LatticeConfig::centered(200));
    auto D = eigendecompose(H);
    const int N = D.n_sites();
    Eigen::MatrixXd I = D.eigenvectors.transpose() * D.eigenvectors;
    CHECK((I - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 0; k < N; k += 17) {
        Eigen::VectorXd q = D.eigenvectors.col(k);
        CHECK((multiply(H, q) - D.eigenvalues[k] * q).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (int k = 1; k < N; ++k) CHECK(D.eigenvalues[k] >= D.eigenvalues[k - 1]);
}

TEST_CASE("spectrum stays inside [-2 - sup|P|, 2 + sup|P|]") {
    const double eps = 0.4;
    auto D = eigendecompose(
        build_finite_section(QuasiPeriodicPotential::cosine(eps), golden_frequency(), LatticeConfig::centered(300)));
    CHECK(D.eigenvalues[0] >= -2 - eps);
    CHECK(D.eigenvalues[D.n_sites() - 1] <= 2 + eps);
}

TEST_CASE("functional calculus") {
    auto H = build_finite_section(QuasiPeriodicPotential::cosine(0.2), golden_frequency(), LatticeConfig::centered(50));
    auto D = eigendecompose(H);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(50, -1.0, 2.0);
    CHECK((apply_function([](double E) { return E; }, D, x) - multiply(H, x)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((apply_function([](double) { return 1.0; }, D, x) - x).cwiseAbs().maxCoeff() < 1e-12);
    // (H+3)^{1/2} squared is H+3
    auto r = [](double E) { return std::sqrt(E + 3.0); };
    Eigen::VectorXd y = apply_function(r, D, apply_function(r, D, x));
    CHECK((y - multiply(H, x) - 3 * x).cwiseAbs().maxCoeff() < 1e-12);
    // unitary exponential preserves the l2 norm
    Eigen::VectorXcd z = apply_function_c([](double E) { return std::exp(std::complex<double>(0, 7.0 * E)); }, D,
                                          x.cast<std::complex<double>>());
    CHECK_THAT(z.norm(), WithinAbs(x.norm(), 1e-12));
}

TEST_CASE("lattice configuration") {
    auto c = LatticeConfig::centered(10);
    CHECK(c.n0 == -5);
    CHECK(c.center() == 5);
    CHECK_THROWS_AS(LatticeConfig::centered(2).validate(), ValidationError);
    CHECK_THROWS_AS(build_finite_section(QuasiPeriodicPotential::cosine(0.1), golden_frequency(),
                                         LatticeConfig::centered(10, {0.0, 0.0})),
                    ValidationError);
}
