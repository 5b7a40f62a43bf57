#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

#include "model.hpp"

namespace kgq {

using Mat2 = Eigen::Matrix2d;

// A(theta) = [[P(theta) - E, -1], [1, 0]]
inline Mat2 transfer_matrix(double E, const QuasiPeriodicPotential& P, const Torus& theta) {
    Mat2 A;
    A << potential_P(P, theta) - E, -1.0, 1.0, 0.0;
    return A;
}

struct CocycleProduct {
    Mat2 M = Mat2::Identity();  // true product = exp(log_scale) * M
    double log_scale = 0.0;
};

// A(theta0+(n-1)omega) ... A(theta0)
inline CocycleProduct iterate(double E, const QuasiPeriodicPotential& P, const FrequencyVector& w,
                              const Torus& theta0, long long n) {
    if (n < 0) throw ValidationError("n must be >= 0");
    CocycleProduct r;
    for (long long j = 0; j < n; ++j) {
        r.M = transfer_matrix(E, P, orbit_point(theta0, w.omega, j)) * r.M;
        if ((j + 1) % 32 == 0) {
            double s = r.M.norm();
            r.M /= s;
            r.log_scale += std::log(s);
        }
    }
    return r;
}

inline Mat2 product_matrix(const CocycleProduct& p) { return std::exp(p.log_scale) * p.M; }

// Average projective angle increment of x -> A_j x. Each increment is lifted into (-pi/2, 3pi/2].
inline double mean_angle_increment(const std::function<Mat2(long long)>& step, Eigen::Vector2d x, long long n) {
    double total = 0.0;
    for (long long j = 0; j < n; ++j) {
        Eigen::Vector2d y = step(j) * x;
        double cross = x[0] * y[1] - x[1] * y[0];
        double dotp = x.dot(y);
        double d = std::atan2(cross, dotp);
        if (d <= -pi / 2) d += 2 * pi;
        total += d;
        x = y / y.norm();
    }
    return total / static_cast<double>(n);
}

// Rotation number of a general step map, averaged over the two coordinate start vectors.
inline double rotation_number_of(const std::function<Mat2(long long)>& step, long long n_iter) {
    double a = mean_angle_increment(step, Eigen::Vector2d(1, 0), n_iter);
    double b = mean_angle_increment(step, Eigen::Vector2d(0, 1), n_iter);
    return std::clamp(0.5 * (a + b), 0.0, pi);
}

inline double rotation_number(double E, const QuasiPeriodicPotential& P, const FrequencyVector& w,
                              const Torus& theta0, long long n_iter) {
    if (n_iter < 1) throw ValidationError("n_iter must be positive");
    return rotation_number_of([&](long long j) { return transfer_matrix(E, P, orbit_point(theta0, w.omega, j)); },
                              n_iter);
}

inline double lyapunov_exponent(double E, const QuasiPeriodicPotential& P, const FrequencyVector& w,
                                const Torus& theta0, long long n_iter) {
    if (n_iter < 1) throw ValidationError("n_iter must be positive");
    CocycleProduct p = iterate(E, P, w, theta0, n_iter);
    double L = (p.log_scale + std::log(p.M.norm())) / static_cast<double>(n_iter);
    return std::max(L, 0.0);
}

}  // namespace kgq
