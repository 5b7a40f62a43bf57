#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <complex>
#include <string>
#include <vector>

#include "operator.hpp"

namespace kgq {

struct RealState {
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    double time = 0.0;
};

struct ComplexState {
    Eigen::VectorXcd q;
    double time = 0.0;
};

struct EnergyReport {
    double linear_energy = 0.0;
    double nonlinear_term = 0.0;
    double total = 0.0;
};

struct DecayProfile {
    std::vector<double> times, linf, l2, l1;
};

using Trajectory = std::vector<RealState>;

// sqrt(E+3) on the spectrum; fails when eps0 >= 1 pushes E+3 below zero
inline Eigen::VectorXd shifted_root(const EigenDecomposition& D) {
    Eigen::VectorXd w(D.n_sites());
    for (int k = 0; k < D.n_sites(); ++k) {
        double s = D.eigenvalues[k] + 3.0;
        if (!(s > 0.0)) throw NumericalError("H+3 is not positive: eigenvalue " + std::to_string(D.eigenvalues[k]));
        w[k] = std::sqrt(s);
    }
    return w;
}

// Exact linear flow in the eigenbasis; one transform of the data serves every sample time.
class LinearFlow {
public:
    LinearFlow(const EigenDecomposition& D, const RealState& s0)
        : D_(D), w_(shifted_root(D)), a_(D.eigenvectors.transpose() * s0.u),
          b_(D.eigenvectors.transpose() * s0.v), s0_(s0) {}

    RealState at(double t) const {
        if (t == s0_.time) return s0_;
        double tau = t - s0_.time;
        Eigen::ArrayXd c = (tau * w_.array()).cos();
        Eigen::ArrayXd s = (tau * w_.array()).sin();
        Eigen::VectorXd au = (c * a_.array() + s / w_.array() * b_.array()).matrix();
        Eigen::VectorXd av = (-w_.array() * s * a_.array() + c * b_.array()).matrix();
        return {D_.eigenvectors * au, D_.eigenvectors * av, t};
    }

    const Eigen::VectorXd& frequencies() const { return w_; }

private:
    const EigenDecomposition& D_;
    Eigen::VectorXd w_, a_, b_;
    RealState s0_;
};

inline RealState linear_propagate(const EigenDecomposition& D, const RealState& s0, double t) {
    if (t == 0.0) return {s0.u, s0.v, s0.time};
    RealState r = LinearFlow(D, {s0.u, s0.v, 0.0}).at(t);
    r.time = s0.time + t;
    return r;
}

// q = (u - i w)/sqrt2 with w = (H+3)^{-1/2} v
inline ComplexState to_complex(const RealState& s, const EigenDecomposition& D) {
    Eigen::VectorXd w = apply_function([](double E) { return 1.0 / std::sqrt(E + 3.0); }, D, s.v);
    const std::complex<double> I(0, 1);
    Eigen::VectorXcd q = (s.u.cast<std::complex<double>>() - I * w.cast<std::complex<double>>()) / std::sqrt(2.0);
    return {q, s.time};
}

inline RealState from_complex(const ComplexState& c, const EigenDecomposition& D) {
    Eigen::VectorXd u = std::sqrt(2.0) * c.q.real();
    Eigen::VectorXd w = -std::sqrt(2.0) * c.q.imag();
    Eigen::VectorXd v = apply_function([](double E) { return std::sqrt(E + 3.0); }, D, w);
    return {u, v, c.time};
}

// dq/dt = i (H+3)^{1/2} q
inline ComplexState complex_propagate(const EigenDecomposition& D, const ComplexState& c, double t) {
    Eigen::VectorXcd q = apply_function_c(
        [t](double E) { return std::exp(std::complex<double>(0, t * std::sqrt(E + 3.0))); }, D, c.q);
    return {q, c.time + t};
}

inline Eigen::VectorXd site_potential(const QuasiPeriodicPotential& P, const FrequencyVector& w,
                                      const LatticeConfig& cfg) {
    Eigen::VectorXd V(cfg.n_sites);
    for (int j = 0; j < cfg.n_sites; ++j) V[j] = eval_potential(P, orbit_point(cfg.theta0, w.omega, cfg.n0 + j));
    return V;
}

// V holds 1 + P per site; ghost sites outside the window are zero
inline EnergyReport energy(const RealState& s, const Eigen::VectorXd& V, double lambda, int kappa) {
    const int N = static_cast<int>(s.u.size());
    double kin = 0.0, grad = 0.0, pot = 0.0, nl = 0.0;
    for (int j = 0; j < N; ++j) {
        kin += s.v[j] * s.v[j];
        pot += V[j] * s.u[j] * s.u[j];
        nl += std::pow(s.u[j], 2 * kappa + 2);
    }
    for (int j = -1; j < N; ++j) {
        double left = j >= 0 ? s.u[j] : 0.0;
        double right = j + 1 < N ? s.u[j + 1] : 0.0;
        grad += (right - left) * (right - left);
    }
    EnergyReport r;
    r.linear_energy = 0.5 * (kin + grad + pot);
    r.nonlinear_term = -lambda / (2.0 * kappa + 2.0) * nl;
    r.total = r.linear_energy + r.nonlinear_term;
    return r;
}

inline EnergyReport energy(const RealState& s, const QuasiPeriodicPotential& P, const FrequencyVector& w,
                           const LatticeConfig& cfg, double lambda, int kappa) {
    return energy(s, site_potential(P, w, cfg), lambda, kappa);
}

struct NonlinearRun {
    Trajectory trajectory;
    bool aborted = false;
    double abort_time = 0.0;
    std::string message;
};

// Strang splitting: exact linear half step, kick v += dt*lambda*u^(2k+1), exact linear half step.
// States are recorded every `record_every` steps (and at t = 0).
inline NonlinearRun nonlinear_evolve(const EigenDecomposition& D, const RealState& s0, double lambda, int kappa,
                                     double t_max, double dt, int record_every = 1) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (kappa < 1) throw ValidationError("kappa must be >= 1");
    if (record_every < 1) throw ValidationError("record_every must be >= 1");
    const Eigen::MatrixXd& Q = D.eigenvectors;
    const Eigen::ArrayXd w = shifted_root(D).array();
    const Eigen::ArrayXd c = (0.5 * dt * w).cos(), s = (0.5 * dt * w).sin();
    const Eigen::ArrayXd c2 = (dt * w).cos(), s2 = (dt * w).sin();

    NonlinearRun run;
    run.trajectory.push_back(s0);
    Eigen::ArrayXd a = (Q.transpose() * s0.u).array();
    Eigen::ArrayXd b = (Q.transpose() * s0.v).array();
    auto rotate = [&](const Eigen::ArrayXd& cc, const Eigen::ArrayXd& ss) {
        Eigen::ArrayXd na = cc * a + ss / w * b;
        b = -w * ss * a + cc * b;
        a = na;
    };
    const long long n_steps = static_cast<long long>(std::llround(t_max / dt));
    rotate(c, s);
    RealState last = s0;
    for (long long step = 1; step <= n_steps; ++step) {
        Eigen::VectorXd u = Q * a.matrix();
        Eigen::VectorXd F = u.array().pow(2 * kappa + 1).matrix();
        b += dt * lambda * (Q.transpose() * F).array();
        bool record = step % record_every == 0 || step == n_steps;
        if (record) {
            rotate(c, s);
            RealState st{Q * a.matrix(), Q * b.matrix(), s0.time + step * dt};
            if (!st.u.allFinite() || !st.v.allFinite() || st.u.cwiseAbs().maxCoeff() > 1e100) {
                run.aborted = true;
                run.abort_time = last.time;
                run.message = "non-finite state after t = " + std::to_string(last.time);
                return run;
            }
            run.trajectory.push_back(st);
            last = st;
            if (step < n_steps) rotate(c, s);
        } else {
            rotate(c2, s2);
            if (!a.allFinite() || a.abs().maxCoeff() > 1e100) {
                run.aborted = true;
                run.abort_time = last.time;
                run.message = "non-finite state after t = " + std::to_string(last.time);
                return run;
            }
        }
    }
    return run;
}

inline DecayProfile decay_profile(const Trajectory& tr) {
    if (tr.empty()) throw ValidationError("empty trajectory");
    DecayProfile p;
    for (const auto& s : tr) {
        p.times.push_back(s.time);
        p.linf.push_back(s.u.cwiseAbs().maxCoeff());
        p.l2.push_back(s.u.norm());
        p.l1.push_back(s.u.cwiseAbs().sum());
    }
    return p;
}

inline double japanese(double t) { return std::sqrt(1.0 + t * t); }

// C1 = sup_t <t>^zeta int_0^inf <t-s>^{-zeta} <s>^{-nu} ds, maximized over a log grid
inline double convolution_constant(double zeta, double nu, double t_max = 1e4, int n_t = 400) {
    using boost::math::quadrature::gauss_kronrod;
    double best = 0.0;
    for (int i = 0; i <= n_t; ++i) {
        double t = i == 0 ? 0.0 : std::pow(10.0, -2.0 + (std::log10(t_max) + 2.0) * i / n_t);
        auto f = [&](double s) { return std::pow(japanese(t - s), -zeta) * std::pow(japanese(s), -nu); };
        double I = 0.0;
        if (t > 0) I += gauss_kronrod<double, 61>::integrate(f, 0.0, t, 15, 1e-12);
        I += gauss_kronrod<double, 61>::integrate(f, t, std::numeric_limits<double>::infinity(), 15, 1e-12);
        best = std::max(best, std::pow(japanese(t), zeta) * I);
    }
    return best;
}

// K = sup_t <t>^zeta |exp(i t (H+3)^{1/2}) delta_m|_inf over the given sites m (indices)
inline double measure_dispersive_constant(const EigenDecomposition& D, double zeta, const std::vector<double>& t_grid,
                                          const std::vector<int>& sites) {
    const Eigen::MatrixXd& Q = D.eigenvectors;
    const Eigen::ArrayXd w = shifted_root(D).array();
    double K = 0.0;
    for (int m : sites) {
        Eigen::ArrayXd c = Q.row(m).transpose().array();
        for (double t : t_grid) {
            Eigen::VectorXd re = Q * ((t * w).cos() * c).matrix();
            Eigen::VectorXd im = Q * ((t * w).sin() * c).matrix();
            double mx = (re.array().square() + im.array().square()).sqrt().maxCoeff();
            K = std::max(K, std::pow(japanese(t), zeta) * mx);
        }
    }
    return K;
}

inline double delta_star(double C1, double K, int kappa) {
    return 0.5 * std::pow(6.0 * C1 * std::pow(4.0 * K, 2 * kappa - 1), -1.0 / (2 * kappa));
}

inline void check_theorem2_parameters(int kappa, double zeta) {
    if (!(kappa > 2 && zeta > 1.0 / (kappa - 2) && zeta < 1.0 / 3.0))
        throw ValidationError("zeta must lie in ((kappa-2)^{-1}, 1/3)");
    if (!(kappa > 5)) throw ValidationError("kappa must exceed 5");
}

struct DuhamelResult {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> u;     // fixed point at each grid time
    std::vector<double> distances;      // d(u_{k+1}, u_k) in the weighted sup metric
    std::vector<double> contraction_factors;
    int iterations = 0;
    bool converged = false;
    bool smallness_violated = false;
};

// Weighted sup metric sup_{n,t} |a_n(t) - b_n(t)| <t>^zeta
inline double weighted_distance(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& a,
                                const std::vector<Eigen::VectorXd>& b, double zeta) {
    double d = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff() * std::pow(japanese(times[i]), zeta));
    return d;
}

// The Duhamel map split into its linear part and the nonlinear correction
//   D[u](t) = lambda int_0^t S^{-1} sin((t-s)S) u(s)^{2k+1} ds,  S = (H+3)^{1/2},
// with composite trapezoid quadrature on the time grid.
class DuhamelOperator {
public:
    DuhamelOperator(const EigenDecomposition& D, const Eigen::VectorXd& psi, const Eigen::VectorXd& phi,
                    double lambda, int kappa, std::vector<double> t_grid)
        : D_(D), w_(shifted_root(D).array()), lambda_(lambda), kappa_(kappa), t_(std::move(t_grid)) {
        if (t_.empty() || t_.front() != 0.0) throw ValidationError("time grid must start at 0");
        for (std::size_t i = 1; i < t_.size(); ++i)
            if (!(t_[i] > t_[i - 1])) throw ValidationError("time grid must be increasing");
        LinearFlow flow(D, {psi, phi, 0.0});
        for (double t : t_) lin_.push_back(flow.at(t).u);
    }

    const std::vector<double>& times() const { return t_; }
    const std::vector<Eigen::VectorXd>& linear() const { return lin_; }

    // nonlinear correction for the trajectory u = linear + w
    std::vector<Eigen::VectorXd> correction(const std::vector<Eigen::VectorXd>& w) const {
        const Eigen::MatrixXd& Q = D_.eigenvectors;
        const int N = D_.n_sites();
        std::vector<Eigen::VectorXd> out(t_.size());
        Eigen::ArrayXd Cacc = Eigen::ArrayXd::Zero(N), Sacc = Eigen::ArrayXd::Zero(N);
        Eigen::ArrayXd gc_prev, gs_prev;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            Eigen::VectorXd u = lin_[i] + w[i];
            Eigen::ArrayXd F = lambda_ * (Q.transpose() * u.array().pow(2 * kappa_ + 1).matrix()).array();
            Eigen::ArrayXd cs = (t_[i] * w_).cos(), sn = (t_[i] * w_).sin();
            Eigen::ArrayXd gc = cs * F, gs = sn * F;
            if (i > 0) {
                double h = 0.5 * (t_[i] - t_[i - 1]);
                Cacc += h * (gc_prev + gc);
                Sacc += h * (gs_prev + gs);
            }
            gc_prev = gc;
            gs_prev = gs;
            out[i] = Q * ((sn * Cacc - cs * Sacc) / w_).matrix();
        }
        return out;
    }

private:
    const EigenDecomposition& D_;
    Eigen::ArrayXd w_;
    double lambda_;
    int kappa_;
    std::vector<double> t_;
    std::vector<Eigen::VectorXd> lin_;
};

struct DuhamelOptions {
    double tol = 1e-14;
    int max_iter = 50;
    double delta_star = 0.0;  // smallness gate, skipped when 0
};

inline DuhamelResult duhamel_fixed_point(const EigenDecomposition& D, const Eigen::VectorXd& psi,
                                         const Eigen::VectorXd& phi, double lambda, int kappa, double zeta,
                                         const std::vector<double>& t_grid, const DuhamelOptions& opt = {}) {
    DuhamelOperator T(D, psi, phi, lambda, kappa, t_grid);
    DuhamelResult r;
    r.times = t_grid;
    if (opt.delta_star > 0.0)
        r.smallness_violated = psi.cwiseAbs().sum() > opt.delta_star || phi.cwiseAbs().sum() > opt.delta_star;
    std::vector<Eigen::VectorXd> w(t_grid.size(), Eigen::VectorXd::Zero(D.n_sites()));
    for (int it = 1; it <= opt.max_iter; ++it) {
        auto next = T.correction(w);
        double d = weighted_distance(t_grid, next, w, zeta);
        if (!r.distances.empty() && r.distances.back() > 0.0) r.contraction_factors.push_back(d / r.distances.back());
        r.distances.push_back(d);
        w = std::move(next);
        r.iterations = it;
        if (d <= opt.tol) {
            r.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < t_grid.size(); ++i) r.u.push_back(T.linear()[i] + w[i]);
    return r;
}

}  // namespace kgq
