#pragma once

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kgq/cocycle.hpp"
#include "kgq/dispersion.hpp"
#include "kgq/evolve.hpp"
#include "kgq/spectral.hpp"

namespace kgq::cli {

using json = nlohmann::json;

inline constexpr const char* version = "0.1.0";
inline constexpr int schema_version = 1;

struct Grid {
    double lo = 0.0, hi = 0.0;
    int n = 1;
    bool log = false;

    std::vector<double> points() const {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) {
            double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            if (i == 0 || i == n - 1) v.push_back(i == 0 ? lo : hi);
            else v.push_back(log ? std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo))) : lo + s * (hi - lo));
        }
        return v;
    }
};

// "lo:hi:n" (linear) or "log:lo:hi:n"
inline Grid parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    Grid g;
    if (!parts.empty() && parts[0] == "log") {
        g.log = true;
        parts.erase(parts.begin());
    }
    if (parts.size() != 3) throw ValidationError("grid '" + spec + "' must read lo:hi:n or log:lo:hi:n");
    try {
        std::size_t pos = 0;
        g.lo = std::stod(parts[0]);
        g.hi = std::stod(parts[1]);
        g.n = std::stoi(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument("n");
    } catch (const std::exception&) {
        throw ValidationError("grid '" + spec + "' has a malformed field");
    }
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.hi < g.lo) throw ValidationError("grid '" + spec + "' needs lo <= hi");
    if (g.n < 1 || g.n > 1000000) throw ValidationError("grid '" + spec + "' needs 1 <= n <= 1e6");
    if (g.n > 1 && g.lo == g.hi) throw ValidationError("grid '" + spec + "' repeats one point");
    if (g.log && !(g.lo > 0.0)) throw ValidationError("log grid '" + spec + "' needs lo > 0");
    return g;
}

struct ExperimentConfig {
    // potential
    double eps = 0.0;   // eps cos(2 pi theta_1) unless modes is given
    json modes = json::array();  // [[k_1..k_d, p_k], ...]; -k is added with the same coefficient
    double radius_r = 0.01;
    // frequency
    std::vector<double> omega;  // empty: golden mean
    double gamma = 0.1, tau = 1.5;
    // lattice
    int sites = 256;
    std::vector<double> theta0;  // empty: origin
    // schedule
    double sigma = 1.0 / 200, sigma_res = 1.0;
    double eps0 = 0.0;  // 0: use the strip norm of the potential
    int J_max = 4, N_min = 20;
    double energy = 0.0;
    // evolution
    double t_max = 100.0, dt = 0.01, lambda = 0.0, amplitude = 1.0;
    int kappa = 6;
    double zeta = 0.32;
    // grids
    std::string egrid = "-2:2:101", tgrid = "log:1:1000:61";
    std::vector<double> mlist{0.0};
    long long n_iter = 100000;
    int theta_samples = 1, cells = 512, window = 10;
    double fit_lo = 10.0;
    // output
    std::string out_dir = "kgq_out";
    unsigned long long seed = 12345;

    FrequencyVector frequency() const {
        if (omega.empty()) return golden_frequency(gamma, tau);
        return {omega, gamma, tau};
    }

    QuasiPeriodicPotential potential() const {
        const int d = frequency().d();
        if (modes.empty()) return QuasiPeriodicPotential::cosine(eps, d, radius_r);
        QuasiPeriodicPotential P;
        P.d = d;
        P.radius_r = radius_r;
        for (const auto& m : modes) {
            if (!m.is_array() || static_cast<int>(m.size()) != d + 1) throw ValidationError("each mode reads [k_1, ..., k_d, p]");
            IVec k;
            for (int i = 0; i < d; ++i) {
                if (!m[i].is_number_integer()) throw ValidationError("mode indices must be integers");
                k.push_back(m[i].get<int>());
            }
            if (l1(k) == 0) throw ValidationError("the zero mode is part of the constant 1, not of P");
            if (!m[d].is_number()) throw ValidationError("mode coefficient must be a number");
            double p = m[d].get<double>();
            P.coeffs[k] = p;
            P.coeffs[neg(k)] = p;
        }
        return P;
    }

    Torus theta() const { return theta0.empty() ? Torus(frequency().d(), 0.0) : theta0; }

    KamSchedule schedule() const {
        double e = eps0 > 0.0 ? eps0 : std::max(strip_norm(potential()), 1e-12);
        return make_schedule(e, sigma, J_max, N_min, sigma_res);
    }

    json to_json() const {
        return {{"eps", eps}, {"modes", modes}, {"radius_r", radius_r}, {"omega", omega}, {"gamma", gamma},
                {"tau", tau}, {"sites", sites}, {"theta0", theta0}, {"sigma", sigma}, {"sigma_res", sigma_res},
                {"eps0", eps0}, {"J_max", J_max}, {"N_min", N_min}, {"energy", energy}, {"t_max", t_max},
                {"dt", dt}, {"lambda", lambda}, {"amplitude", amplitude}, {"kappa", kappa}, {"zeta", zeta},
                {"egrid", egrid}, {"tgrid", tgrid}, {"mlist", mlist}, {"n_iter", n_iter},
                {"theta_samples", theta_samples}, {"cells", cells}, {"window", window}, {"fit_lo", fit_lo},
                {"out_dir", out_dir}, {"seed", seed}};
    }

    void validate() const {
        auto range = [](bool ok, const char* what) {
            if (!ok) throw ValidationError(what);
        };
        FrequencyVector w = frequency();
        w.validate();
        range(std::abs(eps) < 1.0, "eps must satisfy |eps| < 1 (V = 1 + P must stay positive)");
        range(radius_r > 0.0 && radius_r <= 1.0, "radius_r must lie in (0, 1]");
        QuasiPeriodicPotential P = potential();
        P.validate();
        range(strip_norm(P) < 1.0, "the potential's strip norm must be < 1");
        range(static_cast<int>(theta().size()) == w.d(), "theta0 must have one entry per frequency");
        range(sites >= 3 && sites <= 20000, "sites must lie in [3, 20000]");
        range(sigma > 0.0 && sigma < 1.0, "sigma must lie in (0, 1)");
        range(sigma_res > 0.0 && sigma_res <= 10.0, "sigma_res must lie in (0, 10]");
        range(eps0 >= 0.0 && eps0 < 1.0, "eps0 must lie in [0, 1)");
        range(J_max >= 0 && J_max <= 64, "J_max must lie in [0, 64]");
        range(N_min >= 1 && N_min <= 10000, "N_min must lie in [1, 10000]");
        range(std::isfinite(energy), "energy must be finite");
        range(t_max >= 0.0 && t_max <= 1e6, "t_max must lie in [0, 1e6]");
        range(dt > 0.0 && dt <= 1.0, "dt must lie in (0, 1]");
        range(std::isfinite(lambda) && std::isfinite(amplitude), "lambda and amplitude must be finite");
        check_theorem2_parameters(kappa, zeta);
        parse_grid(egrid);
        parse_grid(tgrid);
        range(!mlist.empty(), "mlist must not be empty");
        for (double M : mlist) range(std::isfinite(M), "mlist entries must be finite");
        range(n_iter >= 1 && n_iter <= 1000000000LL, "n_iter must lie in [1, 1e9]");
        range(theta_samples >= 1 && theta_samples <= 10000, "theta_samples must lie in [1, 10000]");
        range(cells >= 1 && cells <= 100000, "cells must lie in [1, 1e5]");
        range(window >= 0 && window <= 500, "window must lie in [0, 500]");
        range(fit_lo > 0.0, "fit_lo must be positive");
        range(!out_dir.empty(), "out_dir must not be empty");
    }
};

namespace detail {

template <class T>
T as(const json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, int> || std::is_same_v<T, long long> || std::is_same_v<T, unsigned long long>) {
            if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == std::floor(v.get<double>())))
                throw ValidationError("");
            if constexpr (std::is_same_v<T, unsigned long long>) {
                if (v.is_number_integer() && !v.is_number_unsigned()) throw ValidationError("");
            }
            return v.is_number_float() ? static_cast<T>(v.get<double>()) : v.get<T>();
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ValidationError("");
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ValidationError("");
            return v.get<std::string>();
        } else {
            if (!v.is_array()) throw ValidationError("");
            T out;
            for (const auto& e : v) {
                if (!e.is_number()) throw ValidationError("");
                out.push_back(e.get<double>());
            }
            return out;
        }
    } catch (const std::exception&) {
        throw ValidationError("field '" + key + "' has the wrong type: " + v.dump());
    }
}

using Setter = std::function<void(ExperimentConfig&, const json&)>;

#define KGQ_FIELD(name, type) \
    {#name, [](ExperimentConfig& c, const json& v) { c.name = as<type>(v, #name); }}

inline const std::map<std::string, Setter>& setters() {
    using dvec = std::vector<double>;
    static const std::map<std::string, Setter> m = {
        KGQ_FIELD(eps, double), KGQ_FIELD(radius_r, double), KGQ_FIELD(omega, dvec), KGQ_FIELD(gamma, double),
        KGQ_FIELD(tau, double), KGQ_FIELD(sites, int), KGQ_FIELD(theta0, dvec), KGQ_FIELD(sigma, double),
        KGQ_FIELD(sigma_res, double), KGQ_FIELD(eps0, double), KGQ_FIELD(J_max, int), KGQ_FIELD(N_min, int),
        KGQ_FIELD(energy, double), KGQ_FIELD(t_max, double), KGQ_FIELD(dt, double), KGQ_FIELD(lambda, double),
        KGQ_FIELD(amplitude, double), KGQ_FIELD(kappa, int), KGQ_FIELD(zeta, double), KGQ_FIELD(egrid, std::string),
        KGQ_FIELD(tgrid, std::string), KGQ_FIELD(mlist, dvec), KGQ_FIELD(n_iter, long long),
        KGQ_FIELD(theta_samples, int), KGQ_FIELD(cells, int), KGQ_FIELD(window, int), KGQ_FIELD(fit_lo, double),
        KGQ_FIELD(out_dir, std::string), KGQ_FIELD(seed, unsigned long long),
        {"modes", [](ExperimentConfig& c, const json& v) {
             if (!v.is_array()) throw ValidationError("field 'modes' must be an array");
             c.modes = v;
         }},
    };
    return m;
}

#undef KGQ_FIELD

// JSON literal if it parses, otherwise a bare string (grids, paths)
inline json value_of(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    return v.is_discarded() ? json(text) : v;
}

inline std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline void set_key(ExperimentConfig& c, const std::string& key, const json& value) {
    auto it = detail::setters().find(key);
    if (it == detail::setters().end()) throw ValidationError("unknown key '" + key + "'");
    it->second(c, value);
}

inline std::vector<std::string> config_keys() {
    std::vector<std::string> k;
    for (auto& [name, s] : detail::setters()) k.push_back(name);
    return k;
}

// key = value lines, values are JSON literals (bare strings allowed), '#' starts a comment
inline void apply_config_text(ExperimentConfig& c, const std::string& text) {
    std::istringstream in(text);
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            // keep '#' inside quoted strings
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') quoted = !quoted;
                if (line[i] == '#' && !quoted) {
                    line.resize(i);
                    break;
                }
            }
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ValidationError("line " + std::to_string(lineno) + ": empty key or value");
        try {
            set_key(c, key, detail::value_of(val));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    ExperimentConfig c;
    apply_config_text(c, ss.str());
    c.validate();
    return c;
}

inline std::string sha256_hex(const std::string& s) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1) throw NumericalError("sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

// out_dir is excluded so that the same experiment hashes the same wherever it is written
inline std::string config_hash(const ExperimentConfig& c) {
    json j = c.to_json();
    j.erase("out_dir");
    return sha256_hex(j.dump());
}

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& p, const std::string& hash, const std::vector<std::string>& cols)
        : out_(p, std::ios::binary) {
        if (!out_) throw ValidationError("cannot write " + p.string());
        out_ << "# config_hash=" << hash << "\n";
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }

    template <class... T>
    void row(const T&... v) {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << cell(v)), ...);
        out_ << "\n";
    }

private:
    static std::string cell(double x) { return num(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long long x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "1" : "0"; }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& p, const json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

struct RunContext {
    ExperimentConfig cfg;
    std::string hash;
    std::filesystem::path dir;
    std::vector<std::string> files;

    std::filesystem::path file(const std::string& name) {
        files.push_back(name);
        return dir / name;
    }
};

// ---------- experiments ----------

inline EigenDecomposition lattice_decomposition(const ExperimentConfig& c, int N) {
    auto cfg = LatticeConfig::centered(N, c.theta());
    return eigendecompose(build_finite_section(c.potential(), c.frequency(), cfg));
}

inline void run_spectrum(RunContext& ctx) {
    auto D = lattice_decomposition(ctx.cfg, ctx.cfg.sites);
    CsvWriter w(ctx.file("spectrum.csv"), ctx.hash, {"index", "eigenvalue"});
    for (int k = 0; k < D.n_sites(); ++k) w.row(k + 1, D.eigenvalues[k]);
}

// delta_0 data; exact linear flow on the t-grid when lambda = 0, Strang splitting otherwise
inline void run_evolve(RunContext& ctx) {
    const auto& c = ctx.cfg;
    auto cfg = LatticeConfig::centered(c.sites, c.theta());
    auto D = eigendecompose(build_finite_section(c.potential(), c.frequency(), cfg));
    Eigen::VectorXd V = site_potential(c.potential(), c.frequency(), cfg);
    RealState s0{Eigen::VectorXd::Zero(c.sites), Eigen::VectorXd::Zero(c.sites), 0.0};
    s0.u[cfg.center()] = c.amplitude;
    Trajectory tr;
    std::string note;
    if (c.lambda == 0.0) {
        LinearFlow flow(D, s0);
        tr.push_back(s0);
        for (double t : parse_grid(c.tgrid).points())
            if (t > 0.0 && t <= c.t_max) tr.push_back(flow.at(t));
    } else {
        long long steps = std::llround(c.t_max / c.dt);
        int every = static_cast<int>(std::max<long long>(1, steps / 500));
        auto run = nonlinear_evolve(D, s0, c.lambda, c.kappa, c.t_max, c.dt, every);
        if (run.aborted) throw NumericalError(run.message);
        tr = std::move(run.trajectory);
    }
    CsvWriter w(ctx.file("evolve.csv"), ctx.hash,
                {"t", "linf", "l2", "l1", "linear_energy", "nonlinear_term", "total_energy"});
    for (const auto& s : tr) {
        auto e = energy(s, V, c.lambda, c.kappa);
        w.row(s.time, s.u.cwiseAbs().maxCoeff(), s.u.norm(), s.u.cwiseAbs().sum(), e.linear_energy, e.nonlinear_term,
              e.total);
    }
}

inline std::vector<Torus> theta_sample(const ExperimentConfig& c) {
    std::vector<Torus> th{c.theta()};
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 1; i < c.theta_samples; ++i) {
        Torus t(c.frequency().d());
        for (double& x : t) x = u(rng);
        th.push_back(t);
    }
    return th;
}

inline void run_rotation(RunContext& ctx) {
    const auto& c = ctx.cfg;
    auto P = c.potential();
    auto w = c.frequency();
    auto thetas = theta_sample(c);
    CsvWriter out(ctx.file("rotation.csv"), ctx.hash, {"E", "rho", "lyapunov"});
    for (double E : parse_grid(c.egrid).points()) {
        double rho = 0.0, L = 0.0;
        for (const auto& th : thetas) {
            rho += rotation_number(E, P, w, th, c.n_iter);
            L += lyapunov_exponent(E, P, w, th, c.n_iter);
        }
        out.row(E, rho / thetas.size(), L / thetas.size());
    }
}

inline json step_json(const StepRecord& s) {
    return {{"j", s.j}, {"xi", s.xi}, {"k", s.k ? json(*s.k) : json(nullptr)}, {"residual", s.residual},
            {"defect", s.defect}};
}

inline void run_kam(RunContext& ctx) {
    const auto& c = ctx.cfg;
    auto rep = reduce(c.energy, c.potential(), c.frequency(), c.schedule(), true);
    json steps = json::array();
    for (const auto& s : rep.steps) steps.push_back(step_json(s));
    write_json(ctx.file("kam.json"), {{"schema_version", schema_version},
                                      {"config_hash", ctx.hash},
                                      {"E", rep.E},
                                      {"steps", steps},
                                      {"rho_J", rep.rho_J},
                                      {"stratum", rep.stratum},
                                      {"complete", rep.complete},
                                      {"message", rep.message}});
}

// per-E reduction table plus a Plancherel summary on the window [-window, window]
inline void run_spectral(RunContext& ctx) {
    const auto& c = ctx.cfg;
    auto P = c.potential();
    auto w = c.frequency();
    auto sched = c.schedule();
    {
        CsvWriter out(ctx.file("spectral.csv"), ctx.hash,
                      {"E", "rho_J", "stratum", "complete", "elliptic", "xi", "residual", "steps"});
        for (double E : parse_grid(c.egrid).points()) {
            auto rep = reduce(E, P, w, sched, false);
            out.row(E, rep.rho_J, rep.stratum, rep.complete, rep.state.elliptic, rep.state.xi, rep.state.residual_norm,
                    static_cast<int>(rep.steps.size()));
        }
    }
    const int lo = -c.window, hi = c.window;
    bool free = P.is_zero();
    SpectralGrid g = free ? free_grid(64, lo, hi) : perturbed_grid(P, w, sched, c.cells, lo, hi, c.theta());
    Eigen::VectorXd d0 = Eigen::VectorXd::Zero(g.sites());
    d0[-lo] = 1.0;
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd q(g.sites());
    for (int i = 0; i < q.size(); ++i) q[i] = nd(rng);
    q /= q.cwiseAbs().sum();
    int margin = std::min(2, c.window);
    write_json(ctx.file("spectral.json"), {{"schema_version", schema_version},
                                           {"config_hash", ctx.hash},
                                           {"grid", free ? "free" : "perturbed"},
                                           {"nodes", static_cast<int>(g.E.size())},
                                           {"excluded", g.excluded},
                                           {"excluded_mass", g.excluded_mass},
                                           {"negative_weights", g.negative_weights},
                                           {"plancherel_delta0", plancherel_defect(d0, g)},
                                           {"plancherel_random", plancherel_defect(q, g)},
                                           {"inverse_error_random", inverse_check(q, g, margin)}});
}

inline void run_dispersion(RunContext& ctx) {
    const auto& c = ctx.cfg;
    if (!c.potential().is_zero())
        throw ValidationError("the dispersion sweep integrates the free phase; set eps = 0 and no modes");
    auto sweep = dispersive_bound_sweep(parse_grid(c.tgrid).points(), c.mlist, [](double) { return 1.0; }, free_E);
    CsvWriter out(ctx.file("dispersion.csv"), ctx.hash, {"t", "M", "re", "im", "abs", "bound", "ratio"});
    for (const auto& r : sweep.rows) out.row(r.t, r.M, r.value.real(), r.value.imag(), std::abs(r.value), r.bound, r.ratio);
    json scaled = json::array();
    for (std::size_t i = 0; i < sweep.times.size(); ++i) scaled.push_back({{"t", sweep.times[i]}, {"scaled_max", sweep.scaled_max[i]}, {"J_star", J_star(sweep.times[i])}});
    write_json(ctx.file("dispersion.json"), {{"schema_version", schema_version},
                                             {"config_hash", ctx.hash},
                                             {"fitted_constant", sweep.fitted_constant},
                                             {"paper_bounds_hold", sweep.pass},
                                             {"per_time", scaled}});
}

// delta_0 data on N >= 2.2 t_max + 100 sites, |u|_inf on a log t-grid, fitted over [fit_lo, t_max]
inline void run_decay(RunContext& ctx) {
    const auto& c = ctx.cfg;
    if (!(c.t_max > c.fit_lo)) throw ValidationError("decay needs t_max > fit_lo");
    const int N = std::max(c.sites, static_cast<int>(std::ceil(2.2 * c.t_max + 100)));
    if (N > 20000) throw ValidationError("t_max too large for a dense decomposition");
    auto D = lattice_decomposition(c, N);
    RealState s0{Eigen::VectorXd::Zero(N), Eigen::VectorXd::Zero(N), 0.0};
    s0.u[N / 2] = c.amplitude;
    LinearFlow flow(D, s0);
    Trajectory tr{s0};
    for (double t : Grid{1.0, c.t_max, 121, true}.points()) tr.push_back(flow.at(t));
    auto prof = decay_profile(tr);
    {
        CsvWriter out(ctx.file("decay.csv"), ctx.hash, {"t", "linf", "l2", "l1"});
        for (std::size_t i = 0; i < prof.times.size(); ++i) out.row(prof.times[i], prof.linf[i], prof.l2[i], prof.l1[i]);
    }
    auto fit = fit_decay_exponent(prof, c.fit_lo, c.t_max);
    write_json(ctx.file("decay.json"), {{"schema_version", schema_version},
                                        {"config_hash", ctx.hash},
                                        {"sites", N},
                                        {"exponent", fit.exponent},
                                        {"intercept", fit.intercept},
                                        {"fit_window", {fit.t_lo, fit.t_hi}},
                                        {"rms_residual", fit.rms_residual},
                                        {"samples", fit.samples},
                                        {"envelope", decay_envelope(prof, c.fit_lo, c.t_max)}});
}

inline const std::map<std::string, std::pair<std::string, void (*)(RunContext&)>>& commands() {
    static const std::map<std::string, std::pair<std::string, void (*)(RunContext&)>> m = {
        {"spectrum", {"eigenvalues of the finite section", run_spectrum}},
        {"evolve", {"linear or nonlinear lattice evolution from delta_0 data", run_evolve}},
        {"rotation", {"rotation number and Lyapunov exponent over the E-grid", run_rotation}},
        {"kam", {"KAM reducibility report at one energy", run_kam}},
        {"spectral", {"rho_J over the E-grid and a Plancherel check", run_spectral}},
        {"dispersion", {"oscillatory integral sweep over the t-grid and M-list", run_dispersion}},
        {"decay", {"dispersive decay fit of |u|_inf", run_decay}},
    };
    return m;
}

// manifest.json accumulates one entry per command run in the directory
inline void write_manifest(const RunContext& ctx, const std::string& command, double wall) {
    auto path = ctx.dir / "manifest.json";
    json m = json::object();
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        m = json::parse(in, nullptr, false);
        if (m.is_discarded() || !m.is_object()) m = json::object();
    }
    m["schema_version"] = schema_version;
    m["code_version"] = version;
    m["experiments"][command] = {{"config_hash", ctx.hash},
                                 {"seed", ctx.cfg.seed},
                                 {"config", ctx.cfg.to_json()},
                                 {"wall_clock_seconds", wall},
                                 {"files", ctx.files}};
    write_json(path, m);
}

inline std::string flag_name(std::string key) {
    for (char& ch : key)
        if (ch == '_') ch = '-';
    return "--" + key;
}

// exit 0 on success, 1 on validation or usage errors, 2 on numerical failure
inline int dispatch(int argc, const char* const* argv, std::ostream& err = std::cerr) {
    CLI::App app{"quasi-periodic Klein-Gordon lattice experiments", "kgq"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version);
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::App*> subs;
    for (auto& [name, entry] : commands()) {
        CLI::App* s = app.add_subcommand(name, entry.first);
        s->add_option("--config", config_path, "key = value config file");
        for (const auto& key : config_keys()) {
            std::string names = flag_name(key);
            if (key == "t_max") names += ",--tmax";
            if (key == "out_dir") names += ",--out";
            s->add_option(names, flags[key], "override config key " + key)->allow_extra_args(false);
        }
        subs[name] = s;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 1;
    }
    std::string command;
    for (auto& [name, s] : subs)
        if (s->parsed()) command = name;
    try {
        auto t0 = std::chrono::steady_clock::now();
        ExperimentConfig cfg;
        if (const char* env = std::getenv("KGQ_OUT_DIR"); env && *env) cfg.out_dir = env;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ValidationError("cannot open config file '" + config_path + "'");
            std::stringstream ss;
            ss << f.rdbuf();
            apply_config_text(cfg, ss.str());
        }
        for (const auto& key : config_keys()) {
            if (subs[command]->count(flag_name(key)) == 0) continue;
            try {
                set_key(cfg, key, detail::value_of(flags[key]));
            } catch (const ValidationError& e) {
                throw ValidationError(flag_name(key) + ": " + e.what());
            }
        }
        cfg.validate();
        RunContext ctx{cfg, config_hash(cfg), cfg.out_dir, {}};
        std::filesystem::create_directories(ctx.dir);
        commands().at(command).second(ctx);
        write_manifest(ctx, command, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return 0;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace kgq::cli
