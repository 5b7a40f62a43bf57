#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include "evolve.hpp"
#include "kam.hpp"

namespace kgq {

enum class Regime { outer, middle };

inline const char* regime_name(Regime r) { return r == Regime::outer ? "outer" : "middle"; }

struct PhaseDerivatives {
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;  // d^s sqrt(E+3) / d rho^s
    Regime regime = Regime::outer;
};

// outer iff cos xi0 in [-1, 1/3] or [3/5, 1]; endpoints belong to outer
inline Regime classify_regime(double xi0) {
    double c = std::cos(xi0);
    return (c <= 1.0 / 3.0 + 1e-12 || c >= 3.0 / 5.0 - 1e-12) ? Regime::outer : Regime::middle;
}

// free lattice: E = -2 cos rho, so sqrt(E+3) = sqrt(3 - 2 cos rho)
inline PhaseDerivatives phase_derivatives_free(double xi0) {
    double s = std::sin(xi0), c = std::cos(xi0);
    if (std::abs(s) < 1e-15) throw ValidationError("xi0 must lie strictly inside (0, pi)");
    double g = 3.0 - 2.0 * c;
    PhaseDerivatives p;
    p.d1 = s / std::sqrt(g);
    p.d2 = -(1.0 - 3.0 * c + c * c) / std::pow(g, 1.5);
    p.d3 = -s * (c * c - 3.0 * c + 6.0) / std::pow(g, 2.5);
    p.regime = classify_regime(xi0);
    return p;
}

// Perturbed phase derivatives from finite differences of rho_J, inverted by the chain rule.
inline PhaseDerivatives phase_derivatives_perturbed(double E, double h, const QuasiPeriodicPotential& P,
                                                   const FrequencyVector& w, const KamSchedule& sched) {
    RhoDerivatives r = rho_J_derivatives(E, h, P, w, sched);
    double E1 = 1.0 / r.d1;
    double E2 = -r.d2 / std::pow(r.d1, 3);
    double E3 = (3 * r.d2 * r.d2 - r.d1 * r.d3) / std::pow(r.d1, 5);
    double f = std::sqrt(E + 3.0);
    PhaseDerivatives p;
    p.d1 = E1 / (2 * f);
    p.d2 = E2 / (2 * f) - E1 * E1 / (4 * f * f * f);
    p.d3 = E3 / (2 * f) - 3 * E1 * E2 / (4 * std::pow(f, 3)) + 3 * std::pow(E1, 3) / (8 * std::pow(f, 5));
    p.regime = classify_regime(std::acos(std::clamp(-E / 2, -1.0, 1.0)));
    return p;
}

// Van der Corput: (2^{k-1} 5 - 2) |c lambda|^{-1/k} (|h(b)| + int |h'|)
inline double vdc_constant(int k) {
    if (k != 2 && k != 3) throw ValidationError("k must be 2 or 3");
    return std::ldexp(5.0, k - 1) - 2.0;
}

inline double vdc_bound(int k, double c, double lambda, double h_endpoint, double h_variation) {
    if (!(c > 0.0)) throw ValidationError("c must be positive");
    if (lambda == 0.0) throw ValidationError("lambda must be nonzero");
    return vdc_constant(k) * std::pow(std::abs(c * lambda), -1.0 / k) * (std::abs(h_endpoint) + h_variation);
}

inline double paper_envelope(double t) { return 7624.0 * std::pow(japanese(t), -1.0 / 3.0); }

// |I_M| <= 32 (1 + 4 <t>) / (15 |M|) in the large-M case
inline double large_M_bound(double M, double t) { return 32.0 * (1.0 + 4.0 * japanese(t)) / (15.0 * std::abs(M)); }

inline bool small_M_case(double M, double t) { return std::abs(M) < 32.0 / 5.0 * std::pow(japanese(t), 4.0 / 3.0); }

inline double J_star(double t) { return 201.0 * std::log(std::log(2.0 + japanese(t))); }

struct OscIntegralResult {
    cd value;
    double t = 0.0, M = 0.0;
    double bound_paper = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
    bool low_confidence = false;
};

struct OscOptions {
    double a = 0.0, b = pi;       // rho range
    double max_phase_slope = 1.0;  // sup |d sqrt(E+3)/d rho|
    double rel_tol = 1e-6;
    double abs_tol = 1e-10;
    int max_panels = 1 << 24;
};

// int_a^b h(rho) e^{i t sqrt(E(rho)+3)} cos(M rho) d rho with composite 16-point Gauss-Legendre panels.
// The starting panel count gives at least 8 nodes per period; panels double until two levels agree.
inline OscIntegralResult oscillatory_integral(const std::function<double(double)>& h,
                                              const std::function<double(double)>& E_of_rho, double M, double t,
                                              const OscOptions& o = {}) {
    using GL = boost::math::quadrature::gauss<double, 16>;
    auto rule = [&](long long n) {
        const double w = (o.b - o.a) / n;
        cd s = 0.0;
        for (long long p = 0; p < n; ++p) {
            double mid = o.a + (p + 0.5) * w;
            cd ps = 0.0;
            for (std::size_t i = 0; i < GL::abscissa().size(); ++i)
                for (int sg : {-1, 1}) {
                    double r = mid + sg * 0.5 * w * GL::abscissa()[i];
                    ps += GL::weights()[i] * h(r) * std::exp(cd(0, t * std::sqrt(E_of_rho(r) + 3.0))) * std::cos(M * r);
                }
            s += 0.5 * w * ps;
        }
        return s;
    };
    double periods = (std::abs(t) * o.max_phase_slope + std::abs(M)) * (o.b - o.a) / (2 * pi);
    long long n = std::max<long long>(8, static_cast<long long>(std::ceil(periods / 2.0)));
    OscIntegralResult r;
    r.t = t;
    r.M = M;
    r.bound_paper = paper_envelope(t);
    cd prev = rule(n);
    for (;;) {
        cd next = rule(2 * n);
        r.error_estimate = std::abs(next - prev);
        r.value = next;
        r.panels = static_cast<int>(2 * n);
        if (r.error_estimate <= o.rel_tol * std::abs(next) + o.abs_tol) break;
        if (4 * n > o.max_panels) {
            r.low_confidence = true;
            break;
        }
        n *= 2;
        prev = next;
    }
    return r;
}

inline double free_E(double rho) { return -2.0 * std::cos(rho); }

struct SweepRow {
    double t = 0.0, M = 0.0;
    cd value;
    double bound = 0.0;
    double ratio = 0.0;
    bool small_M = true;
};

struct SweepSummary {
    std::vector<SweepRow> rows;
    std::vector<double> times;
    std::vector<double> scaled_max;  // max_M |I_M| <t>^{1/3} per t
    double fitted_constant = 0.0;    // max over t of scaled_max
    bool pass = true;                // every |I_M| below the applicable paper bound
};

inline SweepSummary dispersive_bound_sweep(const std::vector<double>& t_grid, const std::vector<double>& M_list,
                                           const std::function<double(double)>& h,
                                           const std::function<double(double)>& E_of_rho, const OscOptions& o = {}) {
    SweepSummary s;
    for (double t : t_grid) {
        double mx = 0.0;
        for (double M : M_list) {
            auto r = oscillatory_integral(h, E_of_rho, M, t, o);
            SweepRow row;
            row.t = t;
            row.M = M;
            row.value = r.value;
            row.small_M = small_M_case(M, t);
            row.bound = row.small_M ? paper_envelope(t) : large_M_bound(M, t);
            row.ratio = std::abs(r.value) / row.bound;
            if (row.ratio > 1.0) s.pass = false;
            mx = std::max(mx, std::abs(r.value) * std::pow(japanese(t), 1.0 / 3.0));
            s.rows.push_back(row);
        }
        s.times.push_back(t);
        s.scaled_max.push_back(mx);
        s.fitted_constant = std::max(s.fitted_constant, mx);
    }
    return s;
}

enum class Abscissa { japanese, plain };

struct DecayFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log of the prefactor
    double t_lo = 0.0, t_hi = 0.0;
    double rms_residual = 0.0;
    int samples = 0;
};

// least-squares slope of log y against log <t> (or log t)
inline DecayFit fit_decay_exponent(const std::vector<double>& times, const std::vector<double>& values, double t_lo,
                                   double t_hi, Abscissa ab = Abscissa::japanese) {
    if (times.size() != values.size()) throw ValidationError("times and values differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi || !(values[i] > 0.0)) continue;
        x.push_back(std::log(ab == Abscissa::japanese ? japanese(times[i]) : times[i]));
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 10) throw ValidationError("decay fit needs at least 10 samples in the window");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ValidationError("degenerate decay window");
    DecayFit f;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (f.intercept + f.exponent * x[i]);
        ss += e * e;
    }
    f.rms_residual = std::sqrt(ss / n);
    f.t_lo = t_lo;
    f.t_hi = t_hi;
    f.samples = static_cast<int>(x.size());
    return f;
}

inline DecayFit fit_decay_exponent(const DecayProfile& p, double t_lo, double t_hi, Abscissa ab = Abscissa::japanese) {
    return fit_decay_exponent(p.times, p.linf, t_lo, t_hi, ab);
}

// max over the window of |u|_inf <t>^{1/3}
inline double decay_envelope(const DecayProfile& p, double t_lo, double t_hi) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.times.size(); ++i)
        if (p.times[i] >= t_lo && p.times[i] <= t_hi) m = std::max(m, p.linf[i] * std::pow(japanese(p.times[i]), 1.0 / 3.0));
    return m;
}

}  // namespace kgq
