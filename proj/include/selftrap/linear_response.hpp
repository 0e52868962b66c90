#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "selftrap/equilibrium.hpp"
#include "selftrap/params.hpp"

namespace selftrap {

// Linearized cooling theory at one operating point.  gamma < 0 means cooling;
// energy decays as exp(gamma t).  nmin is present only when gamma < 0.
struct CoolingReport {
    double omega_m = 0.0;   // mechanical frequency (units of A)
    double omega_m2 = 0.0;  // omega_M^2
    double s1_plus = 0.0, s1_minus = 0.0; // S_1(+omega_M), S_1(-omega_M)
    double s2_plus = 0.0, s2_minus = 0.0;
    double gamma = 0.0;
    double gamma_field1 = 0.0, gamma_field2 = 0.0;
    std::optional<double> nmin;
};

// Self-trapping frequency squared:
//   omega_M^2 = 2 eps^2 (|alpha1|^2 cos 2x0 + |alpha2|^2 cos 2(x0-phi)).
// May be <= 0 (anti-trapping) for general phi; callers must reject that
// before taking a square root.
inline double mechanical_frequency_sq(const Equilibrium& eq, const ScaledParams& p) {
    const TrapGeometry g = trap_geometry(eq.x0, p.phase);
    return 2.0 * p.eps2 * (std::norm(eq.alpha1) * g.c1 + std::norm(eq.alpha2) * g.c2);
}

// Lorentzian weights of the two fields at frequency omega:
//   S_1(w) = |alpha1|^2 sin^2 2x0        / ((Delta_1^x - w)^2 + kappa_A^2)
//   S_2(w) = |alpha2|^2 sin^2 2(x0-phi)  / ((Delta_2^x - w)^2 + kappa_A^2)
// For phi = pi/4 the field-2 geometric factor equals cos^2 2x0.
inline std::pair<double, double>
spectral_weights(double omega, const Equilibrium& eq, const ScaledParams& p) {
    const TrapGeometry g = trap_geometry(eq.x0, p.phase);
    const double k2 = p.kappaA * p.kappaA;
    const double s1 = std::norm(eq.alpha1) * g.s1 * g.s1
                      / ((eq.d1x - omega) * (eq.d1x - omega) + k2);
    const double s2 = std::norm(eq.alpha2) * g.s2 * g.s2
                      / ((eq.d2x - omega) * (eq.d2x - omega) + k2);
    return {s1, s2};
}

// Optomechanical rate:
//   Gamma = (eps^2 kappa_A / omega_M) [S1(w) + S2(w) - S1(-w) - S2(-w)]
// split into per-field contributions (gamma = gamma_field1 + gamma_field2).
inline CoolingReport cooling_rate(const Equilibrium& eq, const ScaledParams& p) {
    CoolingReport rep;
    rep.omega_m2 = mechanical_frequency_sq(eq, p);
    if (!(rep.omega_m2 > 0.0))
        throw UnstableEquilibriumError("cooling_rate: omega_M^2 <= 0 (unstable equilibrium)");
    rep.omega_m = std::sqrt(rep.omega_m2);

    std::tie(rep.s1_plus, rep.s2_plus) = spectral_weights(rep.omega_m, eq, p);
    std::tie(rep.s1_minus, rep.s2_minus) = spectral_weights(-rep.omega_m, eq, p);

    const double pref = p.eps2 * p.kappaA / rep.omega_m;
    rep.gamma_field1 = pref * (rep.s1_plus - rep.s1_minus);
    rep.gamma_field2 = pref * (rep.s2_plus - rep.s2_minus);
    rep.gamma = rep.gamma_field1 + rep.gamma_field2;

    if (rep.gamma < 0.0) {
        const double up = rep.s1_plus + rep.s2_plus;
        const double down = rep.s1_minus + rep.s2_minus;
        rep.nmin = up / (down - up);
    }
    return rep;
}

// Half-splitting of the r2+- (field 1) or r1+- (field 2) cooling resonances.
// y absent means the radicand is negative: the resonances are not split.
struct SplittingResult {
    std::optional<double> y;
    double approx_y = 0.0; // small-angle estimate
    int which_field = 1;
};

inline SplittingResult
sideband_splitting(const ScaledParams& p, const Equilibrium& eq, int which_field) {
    const TrapGeometry g = trap_geometry(eq.x0, p.phase);
    const double k2 = p.kappaA * p.kappaA;
    SplittingResult res;
    res.which_field = which_field;
    if (which_field == 1) {
        // y1 = sqrt(2 eps^2 / ((Delta_2^x)^2 cos 2x0) - kappa_A^2), about Delta_1^x = 0
        if (!(g.c1 > 0.0))
            throw InvalidParameterError("sideband_splitting: requires cos 2x0 > 0 for field 1");
        const double radicand = 2.0 * p.eps2 / (eq.d2x * eq.d2x * g.c1) - k2;
        if (radicand >= 0.0) res.y = std::sqrt(radicand);
        res.approx_y = std::sqrt(2.0) * p.eps() / std::abs(p.delta2 + 0.5);
    } else if (which_field == 2) {
        // y2 = sqrt(2 eps^2 R^2 / ((Delta_1^x)^2 sin 2x0) - kappa_A^2), about Delta_2^x = 0
        if (!(g.s1 > 0.0))
            throw InvalidParameterError("sideband_splitting: requires sin 2x0 > 0 for field 2");
        const double r2 = p.drive_ratio * p.drive_ratio;
        const double radicand = 2.0 * p.eps2 * r2 / (eq.d1x * eq.d1x * g.s1) - k2;
        if (radicand >= 0.0) res.y = std::sqrt(radicand);
        res.approx_y = std::sqrt(2.0) * p.eps() * p.drive_ratio / std::abs(p.delta1 + 0.5);
    } else {
        throw InvalidParameterError("sideband_splitting: which_field must be 1 or 2");
    }
    return res;
}

// First-order system for (dx, dp, Re da1, Im da1, Re da2, Im da2).
// eigen_decays holds one (Re lambda, |Im lambda|) entry per eigenvalue with
// Im >= 0; the undamped mechanics plus two damped field modes give
// trace = -4 kappa_A exactly.
struct LinearSystem {
    Eigen::Matrix<double, 6, 6> matrix;
    std::vector<std::pair<double, double>> eigen_decays;
};

inline LinearSystem build_linear_system(const Equilibrium& eq, const ScaledParams& p) {
    const TrapGeometry g = trap_geometry(eq.x0, p.phase);
    const double w2 = mechanical_frequency_sq(eq, p);
    const double k = p.kappaA;
    const std::complex<double> a1 = eq.alpha1, a2 = eq.alpha2;

    // d(dx)/dt   = dp
    // d(dp)/dt   = -w2 dx - 2 eps^2 [s1 Re(alpha1* da1) + s2 Re(alpha2* da2)]
    // d(da_i)/dt = (i Delta_i^x - kappa_A) da_i - i alpha_i s_i dx
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    m(0, 1) = 1.0;
    m(1, 0) = -w2;
    m(1, 2) = -2.0 * p.eps2 * g.s1 * a1.real();
    m(1, 3) = -2.0 * p.eps2 * g.s1 * a1.imag();
    m(1, 4) = -2.0 * p.eps2 * g.s2 * a2.real();
    m(1, 5) = -2.0 * p.eps2 * g.s2 * a2.imag();
    m(2, 2) = -k; m(2, 3) = -eq.d1x; m(2, 0) = a1.imag() * g.s1;
    m(3, 2) = eq.d1x; m(3, 3) = -k;  m(3, 0) = -a1.real() * g.s1;
    m(4, 4) = -k; m(4, 5) = -eq.d2x; m(4, 0) = a2.imag() * g.s2;
    m(5, 4) = eq.d2x; m(5, 5) = -k;  m(5, 0) = -a2.real() * g.s2;

    LinearSystem sys;
    sys.matrix = m;
    Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> solver(m);
    for (int i = 0; i < 6; ++i) {
        const std::complex<double> ev = solver.eigenvalues()[i];
        if (ev.imag() >= 0.0) sys.eigen_decays.emplace_back(ev.real(), ev.imag());
    }
    return sys;
}

// The eigenmode whose oscillation frequency is closest to omega_m; ties go to
// the smallest |decay|.  In the weak-coupling regime its decay equals Gamma/2.
inline std::pair<double, double> mechanical_mode(const LinearSystem& sys, double omega_m) {
    std::pair<double, double> best{0.0, 0.0};
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& [decay, freq] : sys.eigen_decays) {
        const double dist = std::abs(freq - omega_m);
        if (dist < best_dist
            || (dist == best_dist && std::abs(decay) < std::abs(best.first))) {
            best_dist = dist;
            best = {decay, freq};
        }
    }
    return best;
}

} // namespace selftrap
