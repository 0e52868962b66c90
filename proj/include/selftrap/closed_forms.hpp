#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "selftrap/linear_response.hpp"

namespace selftrap {

enum class ResonanceKind { sr_r2, dr_small_angle, dr_symmetric, dr_numeric };

inline const char* to_string(ResonanceKind k) {
    switch (k) {
        case ResonanceKind::sr_r2: return "SR_r2";
        case ResonanceKind::dr_small_angle: return "DR_small_angle";
        case ResonanceKind::dr_symmetric: return "DR_symmetric";
        case ResonanceKind::dr_numeric: return "DR_numeric";
    }
    return "?";
}

// A resonant operating point: detunings, the frequency predicted there and
// the associated closed-form (or, for dr_numeric, full-theory) rate.
struct ResonancePoint {
    double delta1 = 0.0, delta2 = 0.0;
    double omega_m = 0.0;
    double gamma_predicted = 0.0;
    ResonanceKind kind = ResonanceKind::sr_r2;
};

// Single-resonance (r2) rate: Gamma_SR = -R^2 eps kappa_A^2 / (sqrt2 (2 eps^2 + kappa_A^4)).
// Maximum at eps = kappa_A^2/sqrt2 where it equals -R^2/4 for any kappa_A;
// falls off as 1/eps at strong driving.  Negative = cooling.
inline double gamma_sr(double eps, double kappa_a, double drive_ratio) {
    const double k2 = kappa_a * kappa_a;
    return -drive_ratio * drive_ratio * eps * k2
           / (std::sqrt(2.0) * (2.0 * eps * eps + k2 * k2));
}

// r2 operating point: x0 ~ 0, Delta_1^x = 0, Delta_2^x = -omega_M with
// omega_M = sqrt2 eps / kappa_A.
inline ResonancePoint sr_detunings(double eps, double kappa_a, double drive_ratio) {
    if (!(eps > 0.0)) throw InvalidParameterError("sr_detunings: eps must be > 0");
    ResonancePoint rp;
    rp.omega_m = std::sqrt(2.0) * eps / kappa_a;
    rp.delta1 = -1.0;
    rp.delta2 = -rp.omega_m - 0.5;
    rp.gamma_predicted = gamma_sr(eps, kappa_a, drive_ratio);
    rp.kind = ResonanceKind::sr_r2;
    return rp;
}

// Double-resonance frequency, the positive root of w^2 (w^2 + kappa_A^2) = 2 eps^2:
//   omega_M^2 = -kappa_A^2/2 + sqrt(kappa_A^4 + 8 eps^2)/2
inline double dr_frequency(double eps, double kappa_a) {
    const double k2 = kappa_a * kappa_a;
    const double w2 = -0.5 * k2 + 0.5 * std::sqrt(k2 * k2 + 8.0 * eps * eps);
    return std::sqrt(std::max(0.0, w2));
}

// Gamma_DR = -eps^2 (R^2 + R^4) / (kappa_A omega_M (omega_M^2 + kappa_A^2)),
// identically -(R^2 + R^4) omega_M / (2 kappa_A); grows as sqrt(eps).
inline double gamma_dr(double eps, double kappa_a, double drive_ratio) {
    const double w = dr_frequency(eps, kappa_a);
    const double r2 = drive_ratio * drive_ratio;
    return -eps * eps * (r2 + r2 * r2) / (kappa_a * w * (w * w + kappa_a * kappa_a));
}

// Small-angle double-resonance point: x0 ~ R^2/2 and Delta_i^x = -omega_M.
// Uses exact cos R^2 / sin R^2 in the detuning offsets.
inline ResonancePoint dr_detunings(double eps, double kappa_a, double drive_ratio) {
    if (!(eps > 0.0)) throw InvalidParameterError("dr_detunings: eps must be > 0");
    if (drive_ratio > 1.0)
        throw InvalidParameterError("dr_detunings: drive_ratio must be <= 1");
    const double two_x0 = drive_ratio * drive_ratio;
    ResonancePoint rp;
    rp.omega_m = dr_frequency(eps, kappa_a);
    rp.delta1 = -rp.omega_m - 0.5 * (1.0 + std::cos(two_x0));
    rp.delta2 = -rp.omega_m - 0.5 * (1.0 + std::sin(two_x0));
    rp.gamma_predicted = gamma_dr(eps, kappa_a, drive_ratio);
    rp.kind = ResonanceKind::dr_small_angle;
    return rp;
}

// Symmetric double resonance (R = 1, x0 = pi/8):
//   omega_M    = sqrt(-kappa_A^2/2 + sqrt(kappa_A^4/4 + 2 sqrt2 eps^2))
//   Gamma_opt  = -(eps^2 kappa_A / omega_M) (kappa_A^2 + omega_M^2)^-1
//                 (1/kappa_A^2 - 1/(kappa_A^2 + 4 omega_M^2))
// Returned negative-for-cooling like every rate in this library.
inline std::pair<double, double> symmetric_dr(double eps, double kappa_a) {
    if (!(eps > 0.0)) throw InvalidParameterError("symmetric_dr: eps must be > 0");
    const double k2 = kappa_a * kappa_a;
    const double w2 = -0.5 * k2 + std::sqrt(0.25 * k2 * k2 + 2.0 * std::sqrt(2.0) * eps * eps);
    const double w = std::sqrt(std::max(0.0, w2));
    const double gamma_opt = -(eps * eps * kappa_a / w) / (k2 + w2)
                             * (1.0 / k2 - 1.0 / (k2 + 4.0 * w2));
    return {w, gamma_opt};
}

namespace detail {

// Both-fields-resonant frequency at Delta_1^x = Delta_2^x = -omega_M, where
// tan 2x0 = R^2 exactly:  w^2 (w^2 + kappa_A^2) = 2 eps^2 sqrt(1 + R^4).
// Reduces to dr_frequency as R -> 0 and to the symmetric form at R = 1.
inline double both_resonant_frequency(double eps, double kappa_a, double drive_ratio) {
    const double k2 = kappa_a * kappa_a;
    const double r4 = std::pow(drive_ratio, 4);
    const double rhs = 2.0 * eps * eps * std::sqrt(1.0 + r4);
    const double w2 = -0.5 * k2 + 0.5 * std::sqrt(k2 * k2 + 4.0 * rhs);
    return std::sqrt(std::max(0.0, w2));
}

} // namespace detail

// Numerically refined double-resonance point: damped Newton iteration on
//   F(Delta_1, Delta_2) = (Delta_1^x + omega_M, Delta_2^x + omega_M)
// with a full self-consistent re-solve per evaluation, seeded from the
// both-resonant geometry.  gamma_predicted is the full-theory rate at the
// converged detunings.
inline ResonancePoint dr_detunings_numeric(double eps, double kappa_a, double drive_ratio) {
    if (!(eps > 0.0)) throw InvalidParameterError("dr_detunings_numeric: eps must be > 0");
    if (drive_ratio > 1.0)
        throw InvalidParameterError("dr_detunings_numeric: drive_ratio must be <= 1");

    ScaledParams p;
    p.eps2 = eps * eps;
    p.kappaA = kappa_a;
    p.drive_ratio = drive_ratio;

    const double two_x0 = std::atan(drive_ratio * drive_ratio);
    const double w_seed = detail::both_resonant_frequency(eps, kappa_a, drive_ratio);
    double d1 = -w_seed - 0.5 * (1.0 + std::cos(two_x0));
    double d2 = -w_seed - 0.5 * (1.0 + std::sin(two_x0));

    auto eval = [&](double delta1, double delta2) -> std::array<double, 2> {
        ScaledParams q = p;
        q.delta1 = delta1;
        q.delta2 = delta2;
        const Equilibrium eq = solve_equilibrium_deepest(q);
        const double w2 = mechanical_frequency_sq(eq, q);
        if (!(w2 > 0.0))
            throw UnstableEquilibriumError("dr_detunings_numeric: unstable point visited");
        const double w = std::sqrt(w2);
        return {eq.d1x + w, eq.d2x + w};
    };

    auto norm_inf = [](const std::array<double, 2>& f) {
        return std::max(std::abs(f[0]), std::abs(f[1]));
    };

    std::array<double, 2> f = eval(d1, d2);
    const double tol = 1e-10;
    for (int iter = 0; iter < 60 && norm_inf(f) > tol; ++iter) {
        const double h = 1e-6;
        const std::array<double, 2> f1 = eval(d1 + h, d2);
        const std::array<double, 2> f2 = eval(d1, d2 + h);
        const double j11 = (f1[0] - f[0]) / h, j12 = (f2[0] - f[0]) / h;
        const double j21 = (f1[1] - f[1]) / h, j22 = (f2[1] - f[1]) / h;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) throw SolverError("dr_detunings_numeric: singular Jacobian");
        const double step1 = (j22 * f[0] - j12 * f[1]) / det;
        const double step2 = (j11 * f[1] - j21 * f[0]) / det;

        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt, lambda *= 0.5) {
            try {
                const std::array<double, 2> fn = eval(d1 - lambda * step1, d2 - lambda * step2);
                if (norm_inf(fn) < norm_inf(f)) {
                    d1 -= lambda * step1;
                    d2 -= lambda * step2;
                    f = fn;
                    accepted = true;
                    break;
                }
            } catch (const SolverError&) {
                // step left the solvable region; shrink
            }
        }
        if (!accepted) break;
    }
    if (norm_inf(f) > 1e-6)
        throw SolverError("dr_detunings_numeric: Newton iteration did not converge");

    ScaledParams q = p;
    q.delta1 = d1;
    q.delta2 = d2;
    const Equilibrium eq = solve_equilibrium_deepest(q);
    const CoolingReport rep = cooling_rate(eq, q);

    ResonancePoint rp;
    rp.delta1 = d1;
    rp.delta2 = d2;
    rp.omega_m = rep.omega_m;
    rp.gamma_predicted = rep.gamma;
    rp.kind = ResonanceKind::dr_numeric;
    return rp;
}

} // namespace selftrap
