#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <complex>
#include <functional>

#include "model.hpp"

namespace kgq {

struct LatticeConfig {
    int n_sites = 0;
    Torus theta0{0.0};
    int n0 = 0;  // sites run n0 .. n0+N-1

    // window [-N/2, N/2): site 0 sits at index N/2
    static LatticeConfig centered(int N, Torus theta0 = {0.0}) { return {N, std::move(theta0), -(N / 2)}; }

    int center() const { return -n0; }

    void validate() const {
        if (n_sites < 3) throw ValidationError("lattice needs at least 3 sites");
        if (theta0.empty()) throw ValidationError("theta0 is empty");
    }
};

struct FiniteSection {
    Eigen::VectorXd diagonal;  // P(theta0 + n omega)
    LatticeConfig config;
    double off_diagonal = -1.0;

    int n_sites() const { return static_cast<int>(diagonal.size()); }
};

struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns

    int n_sites() const { return static_cast<int>(eigenvalues.size()); }
};

inline FiniteSection build_finite_section(const QuasiPeriodicPotential& P, const FrequencyVector& w,
                                          const LatticeConfig& cfg) {
    if (cfg.n_sites < 1) throw ValidationError("need at least one site");
    if (static_cast<int>(cfg.theta0.size()) != P.d || w.d() != P.d)
        throw ValidationError("dimension mismatch between potential, omega and theta0");
    FiniteSection H;
    H.config = cfg;
    H.diagonal.resize(cfg.n_sites);
    for (int j = 0; j < cfg.n_sites; ++j)
        H.diagonal[j] = potential_P(P, orbit_point(cfg.theta0, w.omega, cfg.n0 + j));
    return H;
}

// y = H x
inline Eigen::VectorXd multiply(const FiniteSection& H, const Eigen::VectorXd& x) {
    const int N = H.n_sites();
    Eigen::VectorXd y = H.diagonal.cwiseProduct(x);
    for (int j = 0; j + 1 < N; ++j) {
        y[j] += H.off_diagonal * x[j + 1];
        y[j + 1] += H.off_diagonal * x[j];
    }
    return y;
}

inline EigenDecomposition eigendecompose(const FiniteSection& H) {
    const int N = H.n_sites();
    if (N < 1) throw ValidationError("empty finite section");
    EigenDecomposition D;
    D.eigenvalues = H.diagonal;
    D.eigenvectors.resize(N, N);
    std::vector<double> e(std::max(N - 1, 1), H.off_diagonal);
    lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', N, D.eigenvalues.data(), e.data(),
                                     D.eigenvectors.data(), N);
    if (info != 0) throw NumericalError("tridiagonal eigensolver failed, info=" + std::to_string(info));
    for (int c = 0; c < N; ++c) {
        auto col = D.eigenvectors.col(c);
        for (int r = 0; r < N; ++r) {
            if (std::abs(col[r]) > 1e-10) {
                if (col[r] < 0) col = -col;
                break;
            }
        }
    }
    return D;
}

inline Eigen::VectorXd spectral_values(const std::function<double(double)>& f, const EigenDecomposition& D) {
    Eigen::VectorXd fv(D.n_sites());
    for (int k = 0; k < D.n_sites(); ++k) {
        fv[k] = f(D.eigenvalues[k]);
        if (!std::isfinite(fv[k]))
            throw NumericalError("function is not finite at eigenvalue " + std::to_string(D.eigenvalues[k]));
    }
    return fv;
}

// Q f(Lambda) Q^T v
inline Eigen::VectorXd apply_function(const std::function<double(double)>& f, const EigenDecomposition& D,
                                      const Eigen::VectorXd& v) {
    Eigen::VectorXd fv = spectral_values(f, D);
    Eigen::VectorXd c = D.eigenvectors.transpose() * v;
    return D.eigenvectors * fv.cwiseProduct(c);
}

inline Eigen::VectorXcd apply_function_c(const std::function<std::complex<double>(double)>& f,
                                         const EigenDecomposition& D, const Eigen::VectorXcd& v) {
    const int N = D.n_sites();
    Eigen::VectorXcd fv(N);
    for (int k = 0; k < N; ++k) {
        fv[k] = f(D.eigenvalues[k]);
        if (!std::isfinite(fv[k].real()) || !std::isfinite(fv[k].imag()))
            throw NumericalError("function is not finite on the spectrum");
    }
    const Eigen::MatrixXd& Q = D.eigenvectors;
    Eigen::VectorXd re = Q.transpose() * v.real();
    Eigen::VectorXd im = Q.transpose() * v.imag();
    Eigen::VectorXcd c = fv.cwiseProduct(re.cast<std::complex<double>>() + std::complex<double>(0, 1) * im);
    Eigen::VectorXd out_re = Q * c.real();
    Eigen::VectorXd out_im = Q * c.imag();
    return out_re.cast<std::complex<double>>() + std::complex<double>(0, 1) * out_im;
}

}  // namespace kgq
