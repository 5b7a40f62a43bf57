#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include "kam.hpp"

namespace kgq {

struct BlochWave {
    double E = 0.0;
    double rho = 0.0;
    double xi = 0.0;
    int stratum = 0;
    int n_lo = 0;
    std::vector<cd> psi;      // psi_n = e^{i n rho} f_n, psi_0 > 0
    std::vector<cd> f;
    std::vector<cd> beta_nn;  // beta_{n,n}
    std::vector<cd> beta_np;  // beta_{n,n+1}; beta_{n,n-1} vanishes in this construction
    double recurrence_residual = 0.0;

    int size() const { return static_cast<int>(psi.size()); }
    cd at(int n) const { return psi[n - n_lo]; }
};

struct KJ {
    std::vector<double> K, J;
};

// Recurrence residual of psi relative to max |psi|, on interior sites.
inline double recurrence_residual(const BlochWave& w, const QuasiPeriodicPotential& P, const FrequencyVector& om,
                                  const Torus& theta) {
    double mx = 0.0, res = 0.0;
    for (const cd& v : w.psi) mx = std::max(mx, std::abs(v));
    for (int i = 1; i + 1 < w.size(); ++i) {
        int n = w.n_lo + i;
        double V = potential_P(P, orbit_point(theta, om.omega, n));
        cd r = -(w.psi[i + 1] + w.psi[i - 1]) + (V - w.E) * w.psi[i];
        res = std::max(res, std::abs(r));
    }
    return mx > 0 ? res / mx : res;
}

// psi_n = lambda^n (Z(theta+n omega) v)_1 with B v = lambda v, v = (B12, lambda - B11), lambda = e^{i xi_J}
inline BlochWave bloch_wave(const ReducibilityReport& rep, const Torus& theta, int n_lo, int n_hi,
                            double residual_gate = 1e-6) {
    const KamState& s = rep.state;
    if (n_lo > 0 || n_hi < 0) throw ValidationError("site window must contain 0");
    if (!(s.residual_norm <= residual_gate)) throw NumericalError("reduction too coarse for a Bloch wave");
    if (!s.elliptic) throw NumericalError("energy is not in an elliptic stratum");
    const Mat2& B = s.A;
    const cd lam = std::exp(cd(0, s.xi));
    BlochWave w;
    w.E = rep.E;
    w.rho = rep.rho_J;
    w.xi = s.xi;
    w.stratum = rep.stratum;
    w.n_lo = n_lo;
    const int n = n_hi - n_lo + 1;
    std::vector<cd> a(n), b(n);
    w.psi.resize(n);
    for (int i = 0; i < n; ++i) {
        int m = n_lo + i;
        Mat2 Z = s.Z.eval(shifted(theta, s.omega.omega, m));
        a[i] = Z(0, 0) * B(0, 1) - Z(0, 1) * B(0, 0);
        b[i] = Z(0, 1);
        w.psi[i] = std::pow(lam, m) * (a[i] + lam * b[i]);
    }
    cd p0 = w.psi[-n_lo];
    if (std::abs(p0) == 0.0) throw NumericalError("Bloch wave vanishes at the origin");
    cd u = std::conj(p0) / std::abs(p0);
    if (rep.stratum > 0) u *= std::pow(std::abs(std::sin(s.xi)), 5);
    for (auto& v : w.psi) v *= u;
    const double psi0 = w.psi[-n_lo].real();
    w.psi[-n_lo] = psi0;
    w.f.resize(n);
    w.beta_nn.resize(n);
    w.beta_np.resize(n);
    for (int i = 0; i < n; ++i) {
        int m = n_lo + i;
        w.f[i] = std::exp(cd(0, -m * w.rho)) * w.psi[i];
        w.beta_nn[i] = u * psi0 * a[i] * std::exp(cd(0, m * (s.xi - w.rho)));
        w.beta_np[i] = u * psi0 * b[i] * std::exp(cd(0, (m + 1) * (s.xi - w.rho)));
    }
    w.recurrence_residual = recurrence_residual(w, s.P, s.omega, theta);
    return w;
}

inline BlochWave free_bloch_wave(double rho, int n_lo, int n_hi) {
    BlochWave w;
    w.E = -2 * std::cos(rho);
    w.rho = w.xi = rho;
    w.n_lo = n_lo;
    for (int m = n_lo; m <= n_hi; ++m) {
        w.psi.push_back(std::exp(cd(0, m * rho)));
        w.f.push_back(1.0);
        w.beta_nn.push_back(1.0);
        w.beta_np.push_back(0.0);
    }
    return w;
}

// K_n = Im(psi_n conj(psi_0)), J_n = Re(psi_n conj(psi_0))
inline KJ eigenfunctions_KJ(const BlochWave& w) {
    KJ r;
    const cd p0 = std::conj(w.at(0));
    for (const cd& v : w.psi) {
        cd z = v * p0;
        r.K.push_back(z.imag());
        r.J.push_back(z.real());
    }
    return r;
}

// The same pair from the beta expansion sum_{n*} beta_{n,n*} e^{i n* rho}
inline KJ eigenfunctions_KJ_beta(const BlochWave& w) {
    KJ r;
    for (int i = 0; i < w.size(); ++i) {
        int m = w.n_lo + i;
        cd z = w.beta_nn[i] * std::exp(cd(0, m * w.rho)) + w.beta_np[i] * std::exp(cd(0, (m + 1) * w.rho));
        r.K.push_back(z.imag());
        r.J.push_back(z.real());
    }
    return r;
}

struct SpectralGrid {
    int n_lo = 0, n_hi = 0;
    std::vector<double> E, weight, rho, rho_prime;  // weight approximates rho' dE
    std::vector<int> stratum;
    std::vector<KJ> kj;
    int excluded = 0;
    double excluded_mass = 0.0;
    int negative_weights = 0;

    int sites() const { return n_hi - n_lo + 1; }
};

// Composite 16-point Gauss-Legendre in rho over [0, pi]; E = -2 cos rho and rho' dE = d rho.
inline SpectralGrid free_grid(int n_panels, int n_lo, int n_hi) {
    if (n_panels < 1) throw ValidationError("need at least one panel");
    using GL = boost::math::quadrature::gauss<double, 16>;
    SpectralGrid g;
    g.n_lo = n_lo;
    g.n_hi = n_hi;
    const double h = pi / n_panels;
    for (int p = 0; p < n_panels; ++p) {
        double mid = (p + 0.5) * h;
        for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
            for (int sgn : {-1, 1}) {
                if (sgn == -1 && GL::abscissa()[i] == 0.0) continue;
                double r = mid + sgn * 0.5 * h * GL::abscissa()[i];
                g.E.push_back(-2 * std::cos(r));
                g.weight.push_back(0.5 * h * GL::weights()[i]);
                g.rho.push_back(r);
                g.rho_prime.push_back(1.0 / (2 * std::sin(r)));
                g.stratum.push_back(0);
                g.kj.push_back(eigenfunctions_KJ(free_bloch_wave(r, n_lo, n_hi)));
            }
        }
    }
    return g;
}

// Riemann-Stieltjes midpoint rule against d rho_J on a uniform phi grid, E = -R cos phi.
// Cells whose midpoint is rejected are bisected up to max_depth times so that only the
// gap or edge portion of the cell is dropped.
inline SpectralGrid perturbed_grid(const QuasiPeriodicPotential& P, const FrequencyVector& w,
                                   const KamSchedule& sched, int n_cells, int n_lo, int n_hi,
                                   const Torus& theta, int max_depth = 6) {
    if (n_cells < 1) throw ValidationError("need at least one cell");
    SpectralGrid g;
    g.n_lo = n_lo;
    g.n_hi = n_hi;
    double sup = 0.0;
    for (auto& [k, c] : P.coeffs) sup += std::abs(c);
    const double R = 2.0 + 1.01 * sup + 1e-9;
    auto E_of = [R](double phi) { return -R * std::cos(phi); };
    auto cell = [&](auto&& self, double pa, double pb, double ra, double rb, int depth) -> void {
        double wgt = rb - ra;
        if (wgt < 0) {
            ++g.negative_weights;
            wgt = 0.0;
        }
        double pm = 0.5 * (pa + pb);
        double E = E_of(pm);
        auto rep = reduce(E, P, w, sched, false);
        const KamState& s = rep.state;
        bool ok = rep.complete && s.residual_norm <= 1e-6 && s.elliptic && std::abs(std::sin(s.xi)) >= 1e-3;
        if (!ok) {
            if (depth < max_depth && wgt > 0.0) {
                self(self, pa, pm, ra, rep.rho_J, depth + 1);
                self(self, pm, pb, rep.rho_J, rb, depth + 1);
                return;
            }
            ++g.excluded;
            g.excluded_mass += wgt;
            return;
        }
        BlochWave bw = bloch_wave(rep, theta, n_lo, n_hi);
        g.E.push_back(E);
        g.weight.push_back(wgt);
        g.rho.push_back(rep.rho_J);
        g.rho_prime.push_back(wgt / (E_of(pb) - E_of(pa)));
        g.stratum.push_back(rep.stratum);
        g.kj.push_back(eigenfunctions_KJ(bw));
    };
    double pa = 0.0, ra = reduce(E_of(0.0), P, w, sched, false).rho_J;
    for (int i = 0; i < n_cells; ++i) {
        double pb = pi * (i + 1) / n_cells;
        double rb = reduce(E_of(pb), P, w, sched, false).rho_J;
        cell(cell, pa, pb, ra, rb, 0);
        pa = pb;
        ra = rb;
    }
    return g;
}

struct Transform {
    std::vector<double> g1, g2;
};

// q is indexed from the grid's n_lo
inline Transform forward_transform(const Eigen::VectorXd& q, const SpectralGrid& g) {
    if (q.size() != g.sites()) throw ValidationError("q must cover the grid's site window");
    Transform t;
    for (const KJ& kj : g.kj) {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < q.size(); ++i) {
            a += q[i] * kj.K[i];
            b += q[i] * kj.J[i];
        }
        t.g1.push_back(a);
        t.g2.push_back(b);
    }
    return t;
}

inline double transform_norm2(const Transform& t, const SpectralGrid& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.g1.size(); ++i) s += (t.g1[i] * t.g1[i] + t.g2[i] * t.g2[i]) * g.weight[i];
    return s / pi;
}

inline double plancherel_defect(const Eigen::VectorXd& q, const SpectralGrid& g) {
    double q2 = q.squaredNorm();
    if (q2 == 0.0) throw ValidationError("q must be nonzero");
    return std::abs(transform_norm2(forward_transform(q, g), g) / q2 - 1.0);
}

// max_n |(1/pi) int (g1 K_n + g2 J_n) rho' dE - q_n| over sites at least `margin` from the window edge
inline double inverse_check(const Eigen::VectorXd& q, const SpectralGrid& g, int margin = 0) {
    Transform t = forward_transform(q, g);
    double err = 0.0;
    for (int i = margin; i < g.sites() - margin; ++i) {
        double s = 0.0;
        for (std::size_t e = 0; e < g.kj.size(); ++e)
            s += (t.g1[e] * g.kj[e].K[i] + t.g2[e] * g.kj[e].J[i]) * g.weight[e];
        err = std::max(err, std::abs(s / pi - q[i]));
    }
    return err;
}

}  // namespace kgq
