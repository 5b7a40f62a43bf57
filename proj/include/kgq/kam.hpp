#pragma once

#include <fftw3.h>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cocycle.hpp"

namespace kgq {

using cd = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

// ---------- schedule ----------

struct KamSchedule {
    double sigma = 1.0 / 200;
    double sigma_res = 1.0;  // exponent of the resonance threshold eps^sigma_res |k|^-tau
    std::vector<double> eps;
    std::vector<double> N;
    std::vector<int> N_eff;
    int N_min = 20;
    int J_max = 4;

    int truncation(int j) const { return N_eff[std::min<std::size_t>(j, N_eff.size() - 1)]; }
    double eps_at(int j) const { return eps[std::min<std::size_t>(j, eps.size() - 1)]; }
};

inline KamSchedule make_schedule(double eps0, double sigma = 1.0 / 200, int J_max = 4, int N_min = 20,
                                 double sigma_res = 1.0) {
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw ValidationError("eps0 must lie in (0,1)");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    if (J_max < 0) throw ValidationError("J_max must be >= 0");
    if (N_min < 0) throw ValidationError("N_min must be >= 0");
    if (!(sigma_res > 0.0)) throw ValidationError("sigma_res must be positive");
    KamSchedule s;
    s.sigma = sigma;
    s.sigma_res = sigma_res;
    s.N_min = N_min;
    s.J_max = J_max;
    double le = std::log(eps0);
    for (int j = 0; j <= J_max; ++j) {
        s.eps.push_back(std::exp(le));
        double Nj = std::pow(4.0, j + 1) * sigma * std::abs(le);
        s.N.push_back(Nj);
        s.N_eff.push_back(std::max(static_cast<int>(std::min(std::ceil(Nj), 1e6)), N_min));
        le *= 1.0 + sigma;
    }
    return s;
}

// ---------- sl(2) exponential and logarithm ----------

inline Mat2 expm_sl2(const Mat2& X) {
    double t = 0.5 * X.trace();
    Mat2 X0 = X - t * Mat2::Identity();
    double delta = -X0.determinant();  // X0^2 = delta I
    double c, s;
    if (std::abs(delta) < 1e-8) {
        c = 1.0 + delta / 2 + delta * delta / 24;
        s = 1.0 + delta / 6 + delta * delta / 120;
    } else if (delta > 0) {
        double r = std::sqrt(delta);
        c = std::cosh(r);
        s = std::sinh(r) / r;
    } else {
        double r = std::sqrt(-delta);
        c = std::cos(r);
        s = std::sin(r) / r;
    }
    return std::exp(t) * (c * Mat2::Identity() + s * X0);
}

// principal logarithm of a matrix near SL(2,R) identity component
inline Mat2 logm_sl2(Mat2 M) {
    double det = M.determinant();
    if (!(det > 0.0)) throw NumericalError("logarithm of a matrix with non-positive determinant");
    M /= std::sqrt(det);
    double c = 0.5 * M.trace();
    double fac;
    if (std::abs(c - 1.0) < 1e-8) {
        fac = 1.0 - (c - 1.0) / 3.0;
    } else if (c > 1.0) {
        double s = std::acosh(c);
        fac = s / std::sinh(s);
    } else if (c > -1.0) {
        double s = std::acos(c);
        fac = s / std::sin(s);
    } else {
        throw NumericalError("matrix is not in the image of exp");
    }
    return fac * (M - c * Mat2::Identity());
}

// ---------- torus grids and matrix-valued maps ----------

struct TorusGrid {
    int d = 1;
    int L = 256;

    int size() const {
        int n = 1;
        for (int i = 0; i < d; ++i) n *= L;
        return n;
    }
    std::vector<int> multi(int idx) const {
        std::vector<int> m(d);
        for (int i = d - 1; i >= 0; --i) {
            m[i] = idx % L;
            idx /= L;
        }
        return m;
    }
    Torus point(int idx) const {
        auto m = multi(idx);
        Torus th(d);
        for (int i = 0; i < d; ++i) th[i] = static_cast<double>(m[i]) / L;
        return th;
    }
    IVec mode(int idx) const {
        auto m = multi(idx);
        for (int& v : m)
            if (v >= L / 2) v -= L;
        return m;
    }
};

inline TorusGrid default_grid(int d) { return {d, d == 1 ? 256 : d == 2 ? 64 : 16}; }

inline void fft_inplace(std::vector<cd>& a, const TorusGrid& g, int sign) {
    std::vector<int> dims(g.d, g.L);
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan = fftw_plan_dft(g.d, dims.data(), p, p, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

// Values on the grid together with their Fourier coefficients (indexed like the grid).
class TorusMatrixMap {
public:
    TorusMatrixMap() = default;

    static TorusMatrixMap from_values(const TorusGrid& g, std::vector<Mat2> values) {
        TorusMatrixMap m;
        m.grid_ = g;
        m.values_ = std::move(values);
        const int n = g.size();
        m.coef_.assign(n, Mat2c::Zero());
        std::vector<cd> buf(n);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                for (int i = 0; i < n; ++i) buf[i] = m.values_[i](a, b);
                fft_inplace(buf, g, FFTW_FORWARD);
                for (int i = 0; i < n; ++i) m.coef_[i](a, b) = buf[i] / static_cast<double>(n);
            }
        return m;
    }

    // imag_defect receives max |Im| of the synthesized values
    static TorusMatrixMap from_coefficients(const TorusGrid& g, const std::vector<Mat2c>& coef,
                                            double* imag_defect = nullptr) {
        const int n = g.size();
        std::vector<Mat2> values(n, Mat2::Zero());
        std::vector<cd> buf(n);
        double defect = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                for (int i = 0; i < n; ++i) buf[i] = coef[i](a, b);
                fft_inplace(buf, g, FFTW_BACKWARD);
                for (int i = 0; i < n; ++i) {
                    values[i](a, b) = buf[i].real();
                    defect = std::max(defect, std::abs(buf[i].imag()));
                }
            }
        if (imag_defect) *imag_defect = defect;
        return from_values(g, std::move(values));
    }

    const TorusGrid& grid() const { return grid_; }
    const std::vector<Mat2>& values() const { return values_; }
    const std::vector<Mat2c>& coefficients() const { return coef_; }

    double norm() const {
        double s = 0.0;
        for (const auto& c : coef_) s += c.norm();
        return s;
    }

    bool is_zero() const {
        for (const auto& v : values_)
            if (!v.isZero(0.0)) return false;
        return true;
    }

    Mat2 eval(const Torus& th) const {
        Mat2c s = Mat2c::Zero();
        for (int i = 0; i < grid_.size(); ++i) {
            if (coef_[i].cwiseAbs().maxCoeff() == 0.0) continue;
            IVec k = grid_.mode(i);
            s += coef_[i] * std::exp(cd(0, 2 * pi * dot(k, th)));
        }
        return s.real();
    }

private:
    TorusGrid grid_;
    std::vector<Mat2> values_;
    std::vector<Mat2c> coef_;
};

// ---------- eigen-angles ----------

struct EigenAngle {
    double xi = 0.0;
    bool elliptic = false;
};

inline EigenAngle eigen_angle(const Mat2& A) {
    if (std::abs(A.determinant() - 1.0) > 1e-10) throw ValidationError("matrix is not unimodular");
    double c = 0.5 * A.trace();
    return {std::acos(std::clamp(c, -1.0, 1.0)), std::abs(c) <= 1.0};
}

// ((a-d)/2)^2 + bc = (tr/2)^2 - det, without the cancellation of the latter form
inline double discriminant(const Mat2& A) {
    double h = 0.5 * (A(0, 0) - A(1, 1));
    return h * h + A(0, 1) * A(1, 0);
}

// Oriented angle: A v = e^{i xi} v with det[Re v, Im v] < 0, lifted to the branch nearest `prev`.
// Hyperbolic matrices lock to 0 (positive trace) or pi.
inline EigenAngle signed_angle(const Mat2& A, double prev) {
    double c = 0.5 * A.trace();
    double disc = discriminant(A);
    EigenAngle r;
    double base;
    if (disc < 0.0) {
        base = (A(0, 1) < 0 ? 1.0 : -1.0) * std::atan2(std::sqrt(-disc), c);
        r.elliptic = true;
    } else {
        base = c > 0 ? 0.0 : pi;
    }
    r.xi = base + 2 * pi * std::nearbyint((prev - base) / (2 * pi));
    return r;
}

struct EigenBasis {
    Mat2c C;  // columns are eigenvectors
    cd d1, d2;
};

inline EigenBasis eigenbasis(const Mat2& A) {
    const double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    const double h = 0.5 * (a + d);
    const double disc = discriminant(A);
    EigenBasis e;
    if (std::abs(disc) < 1e-26) {
        if ((A - h * Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-13) {
            e.C = Mat2c::Identity();
            e.d1 = e.d2 = h;
            return e;
        }
        throw NumericalError("parabolic constant part: eigenbasis degenerate");
    }
    auto vec = [&](cd mu) -> Eigen::Vector2cd {
        if (std::abs(b) >= std::abs(c)) return {cd(b), mu - a};
        return {mu - d, cd(c)};
    };
    if (disc < 0) {
        cd lam(h, (b < 0 ? 1.0 : -1.0) * std::sqrt(-disc));
        Eigen::Vector2cd v = vec(lam);
        e.C.col(0) = v;
        e.C.col(1) = v.conjugate();
        e.d1 = lam;
        e.d2 = std::conj(lam);
    } else {
        double r = std::sqrt(disc);
        double m1 = h + (h >= 0 ? r : -r);
        double m2 = A.determinant() / m1;
        if (b == 0.0 && c == 0.0) {
            e.C = Mat2c::Identity();
            e.d1 = a;
            e.d2 = d;
            return e;
        }
        e.C.col(0) = vec(m1);
        e.C.col(1) = vec(m2);
        e.d1 = m1;
        e.d2 = m2;
    }
    return e;
}

// ---------- resonances ----------

struct ResonanceCheck {
    bool resonant = false;
    IVec k;                    // minimizing violator
    double distance = std::numeric_limits<double>::infinity();
    int violators = 0;         // more than one signals a weakly Diophantine omega for these parameters
};

inline double dist_mod_pi(double x) { return std::abs(x - pi * std::nearbyint(x / pi)); }

// <k>_omega as an angle: pi <k, omega>
inline double half_angle(const IVec& k, const FrequencyVector& w) { return pi * dot(k, w.omega); }

// all k with 0 < |k|_1 <= N
inline std::vector<IVec> modes_up_to(int d, int N) {
    std::vector<IVec> out;
    if (N < 1) return out;
    IVec k(d, -N);
    for (;;) {
        int n = l1(k);
        if (n > 0 && n <= N) out.push_back(k);
        int i = d - 1;
        while (i >= 0 && k[i] == N) k[i--] = -N;
        if (i < 0) break;
        ++k[i];
    }
    return out;
}

inline ResonanceCheck check_resonance(double xi, const FrequencyVector& w, double eps_j, double sigma, double tau,
                                      int N) {
    ResonanceCheck r;
    for (const IVec& k : modes_up_to(w.d(), N)) {
        double dist = dist_mod_pi(xi - half_angle(k, w));
        if (dist >= std::pow(eps_j, sigma) * std::pow(l1(k), -tau)) continue;
        ++r.violators;
        bool better = !r.resonant || dist < r.distance ||
                      (dist == r.distance && (l1(k) < l1(r.k) || (l1(k) == l1(r.k) && k < r.k)));
        if (better) {
            r.resonant = true;
            r.k = k;
            r.distance = dist;
        }
    }
    return r;
}

// ---------- conjugations ----------

// One factor of the accumulated conjugation: either a half-frequency rotation
// H(theta) = C diag(e^{i pi <k,theta>}, e^{-i pi <k,theta>}) C^{-1}, or exp(Y(theta)) with Y band-limited.
struct ZFactor {
    bool rotation = false;
    IVec k;
    Mat2c C;
    std::vector<std::pair<IVec, Mat2c>> Y;

    Mat2 eval(const Torus& th) const {
        if (rotation) {
            double a = pi * dot(k, th);
            Mat2c D = Mat2c::Zero();
            D(0, 0) = std::exp(cd(0, a));
            D(1, 1) = std::exp(cd(0, -a));
            return (C * D * C.inverse()).real();
        }
        Mat2c s = Mat2c::Zero();
        for (const auto& [m, c] : Y) s += c * std::exp(cd(0, 2 * pi * dot(m, th)));
        return expm_sl2(s.real());
    }
};

struct Conjugacy {
    std::vector<ZFactor> factors;

    // theta is not reduced: rotation factors live on the doubled torus
    Mat2 eval(const Torus& th) const {
        Mat2 Z = Mat2::Identity();
        for (const auto& f : factors) Z = Z * f.eval(th);
        return Z;
    }
};

inline Torus shifted(const Torus& th, const std::vector<double>& omega, double n) {
    Torus r(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) r[i] = th[i] + n * omega[i];
    return r;
}

// ---------- KAM state ----------

// The cocycle is theta -> A exp(f(theta)); Z conjugates the Schroedinger cocycle into it.
struct KamState {
    double E = 0.0;
    QuasiPeriodicPotential P;
    FrequencyVector omega;
    KamSchedule schedule;
    Mat2 A = Mat2::Identity();
    TorusMatrixMap f;
    double xi = 0.0;
    bool elliptic = true;
    std::vector<std::optional<IVec>> history;  // per completed step; empty optional = non-resonant
    int j = 0;
    double residual_norm = 0.0;
    double shift = 0.0;  // sum of pi <k_l, omega>
    double symmetry_defect = 0.0;
    Conjugacy Z;
};

inline KamState initial_state(double E, const QuasiPeriodicPotential& P, const FrequencyVector& w,
                              const KamSchedule& s) {
    if (w.d() != P.d) throw ValidationError("dimension mismatch between potential and omega");
    KamState st;
    st.E = E;
    st.P = P;
    st.omega = w;
    st.schedule = s;
    st.A << -E, -1.0, 1.0, 0.0;
    TorusGrid g = default_grid(P.d);
    std::vector<Mat2> vals(g.size(), Mat2::Zero());
    for (int i = 0; i < g.size(); ++i) vals[i](1, 0) = -potential_P(P, g.point(i));
    st.f = TorusMatrixMap::from_values(g, std::move(vals));
    EigenAngle ea = signed_angle(st.A, pi / 2);
    st.xi = ea.xi;
    st.elliptic = ea.elliptic;
    st.residual_norm = st.f.norm();
    return st;
}

// Conjugate by H_k: the constant part rotates its angle by -pi<k,omega>.
inline KamState resonant_rotation(const KamState& s, const IVec& k0) {
    if (l1(k0) == 0) throw ValidationError("resonant rotation needs k0 != 0");
    if (static_cast<int>(k0.size()) != s.omega.d()) throw ValidationError("k0 dimension mismatch");
    if (!s.elliptic) throw NumericalError("resonant rotation needs an elliptic constant part");
    EigenBasis eb = eigenbasis(s.A);
    const double shift = half_angle(k0, s.omega);
    const Mat2c Cinv = eb.C.inverse();
    KamState r = s;
    Mat2c D = Mat2c::Zero();
    D(0, 0) = std::exp(cd(0, s.xi - shift));
    D(1, 1) = std::exp(cd(0, -(s.xi - shift)));
    r.A = (eb.C * D * Cinv).real();
    ZFactor H;
    H.rotation = true;
    H.k = k0;
    H.C = eb.C;
    const TorusGrid& g = s.f.grid();
    std::vector<Mat2> vals(g.size());
    for (int i = 0; i < g.size(); ++i) {
        Mat2 Hm = H.eval(g.point(i));
        vals[i] = Hm.inverse() * s.f.values()[i] * Hm;
    }
    r.f = TorusMatrixMap::from_values(g, std::move(vals));
    r.xi = s.xi - shift;
    r.shift = s.shift + shift;
    r.Z.factors.push_back(std::move(H));
    r.residual_norm = r.f.norm();
    return r;
}

// One KAM step with truncation |k| <= N_eff(j): absorb the mean, solve the homological
// equation in the eigenbasis of the new constant part, conjugate by exp(Y) pointwise.
inline KamState kam_step(const KamState& s, std::optional<IVec> resonance = std::nullopt) {
    KamState r = s;
    r.history.push_back(std::move(resonance));
    r.j = s.j + 1;
    if (s.f.is_zero()) {
        r.residual_norm = 0.0;
        return r;
    }
    const TorusGrid& g = s.f.grid();
    const int N = std::min(s.schedule.truncation(s.j), g.L / 2 - 1);
    const auto& coef = s.f.coefficients();
    const Mat2 Aplus = s.A * expm_sl2(coef[0].real());
    EigenBasis eb = eigenbasis(Aplus);
    const Mat2c Cinv = eb.C.inverse();
    const cd dd[2] = {eb.d1, eb.d2};

    std::vector<Mat2c> Yhat(g.size(), Mat2c::Zero()), Yshift(g.size(), Mat2c::Zero());
    ZFactor factor;
    for (int i = 1; i < g.size(); ++i) {
        IVec k = g.mode(i);
        int nk = l1(k);
        if (nk == 0 || nk > N) continue;
        cd phase = std::exp(cd(0, 2 * pi * dot(k, s.omega.omega)));
        Mat2c gt = Cinv * coef[i] * eb.C;
        Mat2c Yt;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                cd div = phase * dd[b] / dd[a] - 1.0;
                if (std::abs(div) < 1e-14) throw NumericalError("small divisor below 1e-14 at |k| = " + std::to_string(nk));
                Yt(a, b) = gt(a, b) / div;
            }
        Yhat[i] = eb.C * Yt * Cinv;
        Yshift[i] = Yhat[i] * phase;
        factor.Y.emplace_back(k, Yhat[i]);
    }
    double defect = 0.0, defect2 = 0.0;
    TorusMatrixMap Y = TorusMatrixMap::from_coefficients(g, Yhat, &defect);
    TorusMatrixMap Ys = TorusMatrixMap::from_coefficients(g, Yshift, &defect2);
    const Mat2 Ainv = Aplus.inverse();
    std::vector<Mat2> vals(g.size());
    for (int i = 0; i < g.size(); ++i) {
        Mat2 M = Ainv * expm_sl2(-Ys.values()[i]) * s.A * expm_sl2(s.f.values()[i]) * expm_sl2(Y.values()[i]);
        vals[i] = logm_sl2(M);
    }
    r.f = TorusMatrixMap::from_values(g, std::move(vals));
    r.A = Aplus;
    EigenAngle ea = signed_angle(Aplus, s.xi);
    r.xi = ea.xi;
    r.elliptic = ea.elliptic;
    r.symmetry_defect = std::max(defect, defect2);
    r.Z.factors.push_back(std::move(factor));
    r.residual_norm = r.f.norm();
    return r;
}

inline std::vector<Torus> defect_samples(int d, int n = 256) {
    std::vector<Torus> out;
    for (int s = 0; s < n; ++s) {
        Torus th(d);
        for (int i = 0; i < d; ++i) th[i] = frac((s + 0.5) / n * std::sqrt(2.0 + i) * (i == 0 ? 1.0 / std::sqrt(2.0) : 1.0));
        out.push_back(th);
    }
    return out;
}

struct ConjugacyDefect {
    double defect = 0.0;     // max entry of Z(.+w)^{-1} (A0+F0) Z - A exp(f)
    double condition = 1.0;  // max |Z| |Z^{-1}| over the samples
};

inline ConjugacyDefect conjugacy_defect(const KamState& s, int n_samples = 256) {
    ConjugacyDefect r;
    for (const Torus& th : defect_samples(s.omega.d(), n_samples)) {
        Mat2 Z0 = s.Z.eval(th);
        Mat2 Z1 = s.Z.eval(shifted(th, s.omega.omega, 1.0));
        Mat2 lhs = Z1.inverse() * transfer_matrix(s.E, s.P, th) * Z0;
        Mat2 rhs = s.A * expm_sl2(s.f.eval(th));
        r.defect = std::max(r.defect, (lhs - rhs).cwiseAbs().maxCoeff());
        r.condition = std::max(r.condition, Z0.norm() * Z0.inverse().norm() / 2.0);
    }
    return r;
}

// ---------- full reduction ----------

struct StepRecord {
    int j = 0;
    double xi = 0.0;
    std::optional<IVec> k;
    double residual = 0.0;
    double defect = 0.0;
    double condition = 1.0;
    double N = 0.0;
    int N_eff = 0;
    int violators = 0;
    double symmetry_defect = 0.0;
};

struct ReducibilityReport {
    double E = 0.0;
    std::vector<StepRecord> steps;
    double rho_J = 0.0;
    int stratum = 0;
    bool complete = true;
    std::string message;
    KamState state;
};

inline ReducibilityReport reduce(double E, const QuasiPeriodicPotential& P, const FrequencyVector& w,
                                 const KamSchedule& sched, bool check_defect = true) {
    P.validate();
    w.validate();
    if (!(strip_norm(P) < 1.0)) throw ValidationError("eps0 = strip_norm(P) must be < 1");
    ReducibilityReport rep;
    rep.E = E;
    KamState st = initial_state(E, P, w, sched);
    for (int j = 0; j < sched.J_max; ++j) {
        ResonanceCheck rc = check_resonance(st.xi, w, sched.eps_at(j), sched.sigma_res, w.tau, sched.truncation(j));
        StepRecord rec;
        rec.j = j;
        rec.N = sched.N[std::min<std::size_t>(j, sched.N.size() - 1)];
        rec.N_eff = sched.truncation(j);
        rec.violators = rc.violators;
        try {
            std::optional<IVec> kr;
            if (rc.resonant && st.elliptic && !st.f.is_zero()) {
                st = resonant_rotation(st, rc.k);
                kr = rc.k;
                rep.stratum = j + 1;
            }
            double before = st.residual_norm;
            st = kam_step(st, kr);
            rec.k = kr;
            rec.xi = st.xi;
            rec.residual = st.residual_norm;
            rec.symmetry_defect = st.symmetry_defect;
            if (check_defect) {
                auto cd_ = conjugacy_defect(st);
                rec.defect = cd_.defect;
                rec.condition = cd_.condition;
            }
            rep.steps.push_back(rec);
            if (st.residual_norm > before && st.residual_norm > 1e-13) {
                rep.complete = false;
                rep.message = "step " + std::to_string(j) + " failed to contract";
                break;
            }
        } catch (const NumericalError& e) {
            rep.complete = false;
            rep.message = e.what();
            break;
        }
    }
    rep.rho_J = st.xi + st.shift;
    rep.state = std::move(st);
    return rep;
}

struct RhoDerivatives {
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    double free_d1 = 0.0, free_d2 = 0.0, free_d3 = 0.0;  // at xi0 = arccos(-E/2)
};

// Central differences of rho_J on the stencil E + m h, m = -2..2.
inline RhoDerivatives rho_J_derivatives(double E, double h, const QuasiPeriodicPotential& P,
                                        const FrequencyVector& w, const KamSchedule& sched) {
    if (!(h > 0.0)) throw ValidationError("h must be positive");
    double r[5];
    std::vector<std::optional<IVec>> hist;
    for (int m = -2; m <= 2; ++m) {
        auto rep = reduce(E + m * h, P, w, sched, false);
        if (m == -2) hist = rep.state.history;
        else if (rep.state.history != hist) throw ValidationError("stencil crosses a stratum boundary");
        r[m + 2] = rep.rho_J;
    }
    RhoDerivatives d;
    d.d1 = (r[3] - r[1]) / (2 * h);
    d.d2 = (r[3] - 2 * r[2] + r[1]) / (h * h);
    d.d3 = (r[4] - 2 * r[3] + 2 * r[1] - r[0]) / (2 * h * h * h);
    double x = std::acos(std::clamp(-E / 2, -1.0, 1.0));
    double s = std::sin(x), c = std::cos(x);
    d.free_d1 = 1.0 / (2 * s);
    d.free_d2 = -c / (4 * s * s * s);
    d.free_d3 = (1 + 2 * c * c) / (8 * std::pow(s, 5));
    return d;
}

}  // namespace kgq
