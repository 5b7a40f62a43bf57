#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgq {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using IVec = std::vector<int>;
using Torus = std::vector<double>;

inline constexpr double pi = std::numbers::pi;

inline double frac(double x) { return x - std::floor(x); }

// distance to the nearest integer
inline double dist_z(double x) { return std::abs(x - std::nearbyint(x)); }

inline int l1(const IVec& k) {
    int s = 0;
    for (int v : k) s += std::abs(v);
    return s;
}

inline double dot(const IVec& k, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * x[i];
    return s;
}

inline IVec neg(IVec k) {
    for (int& v : k) v = -v;
    return k;
}

struct FrequencyVector {
    std::vector<double> omega;
    double gamma = 0.1;
    double tau = 1.5;

    int d() const { return static_cast<int>(omega.size()); }

    void validate() const {
        if (omega.empty()) throw ValidationError("frequency vector is empty");
        for (double w : omega)
            if (!(w >= 0.0 && w < 1.0)) throw ValidationError("omega components must lie in [0,1)");
        if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
        if (!(tau > d() - 1)) throw ValidationError("tau must exceed d-1");
    }
};

inline FrequencyVector golden_frequency(double gamma = 0.1, double tau = 1.5) {
    return {{(std::sqrt(5.0) - 1.0) / 2.0}, gamma, tau};
}

// P(theta) = sum_k p_k exp(2 pi i <k,theta>), stored with both k and -k.
struct QuasiPeriodicPotential {
    std::map<IVec, double> coeffs;
    double radius_r = 0.01;
    int d = 1;

    // eps * cos(2 pi theta_1)
    static QuasiPeriodicPotential cosine(double eps, int d = 1, double r = 0.01) {
        QuasiPeriodicPotential P;
        P.d = d;
        P.radius_r = r;
        if (eps != 0.0) {
            IVec k(d, 0);
            k[0] = 1;
            P.coeffs[k] = eps / 2;
            P.coeffs[neg(k)] = eps / 2;
        }
        return P;
    }

    static QuasiPeriodicPotential zero(int d = 1) { return cosine(0.0, d); }

    bool is_zero() const {
        for (auto& [k, c] : coeffs)
            if (c != 0.0) return false;
        return true;
    }

    void validate() const {
        if (d < 1) throw ValidationError("potential dimension must be positive");
        if (!(radius_r > 0.0)) throw ValidationError("analyticity radius must be positive");
        for (auto& [k, c] : coeffs) {
            if (static_cast<int>(k.size()) != d) throw ValidationError("mode dimension mismatch");
            auto it = coeffs.find(neg(k));
            if (it == coeffs.end() || it->second != c)
                throw ValidationError("coefficients must satisfy p_{-k} = p_k");
        }
    }
};

// P(theta) without the constant 1; torus point is reduced mod 1 first.
inline double potential_P(const QuasiPeriodicPotential& P, const Torus& theta) {
    if (static_cast<int>(theta.size()) != P.d)
        throw ValidationError("theta dimension does not match potential");
    Torus th(theta.size());
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = frac(theta[i]);
    double s = 0.0;
    for (auto& [k, c] : P.coeffs) s += c * std::cos(2 * pi * dot(k, th));
    return s;
}

inline double eval_potential(const QuasiPeriodicPotential& P, const Torus& theta) {
    return 1.0 + potential_P(P, theta);
}

// l1-exponential bound on sup_{|Im theta|<=r} |P|
inline double strip_norm(const QuasiPeriodicPotential& P) {
    double s = 0.0;
    for (auto& [k, c] : P.coeffs) s += std::abs(c) * std::exp(2 * pi * l1(k) * P.radius_r);
    return s;
}

// theta0 + n*omega reduced mod 1
inline Torus orbit_point(const Torus& theta0, const std::vector<double>& omega, long long n) {
    Torus th(theta0.size());
    for (std::size_t i = 0; i < th.size(); ++i)
        th[i] = frac(std::fma(static_cast<double>(n), omega[i], theta0[i]));
    return th;
}

struct DiophantineReport {
    IVec worst_n;
    double worst_distance = std::numeric_limits<double>::infinity();  // ||<n,omega>||
    double worst_margin = std::numeric_limits<double>::infinity();    // ||<n,omega>|| |n|^tau / gamma - 1
    bool pass = true;
};

inline DiophantineReport check_diophantine(const FrequencyVector& w, int K_max) {
    if (K_max < 1) throw ValidationError("K_max must be >= 1");
    const int d = w.d();
    DiophantineReport rep;
    IVec n(d, -K_max);
    for (;;) {
        int nn = l1(n);
        int lead = 0;
        for (int v : n)
            if (v != 0) { lead = v; break; }
        if (lead > 0) {  // n and -n give the same distance
            double dist = dist_z(dot(n, w.omega));
            double margin = dist * std::pow(nn, w.tau) / w.gamma - 1.0;
            bool better = margin < rep.worst_margin;
            if (margin == rep.worst_margin && !rep.worst_n.empty()) {
                int wn = l1(rep.worst_n);
                better = nn < wn || (nn == wn && n < rep.worst_n);
            }
            if (better) {
                rep.worst_margin = margin;
                rep.worst_distance = dist;
                rep.worst_n = n;
            }
        }
        int i = 0;
        while (i < d && n[i] == K_max) n[i++] = -K_max;
        if (i == d) break;
        ++n[i];
    }
    rep.pass = rep.worst_margin >= 0.0;
    return rep;
}

}  // namespace kgq
