#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "selftrap/errors.hpp"
#include "selftrap/params.hpp"

namespace selftrap {

// Self-consistent steady state of the two-mode trap.
// x0 is the scaled position (kx); fields are in units of E_1/A.
struct Equilibrium {
    double x0 = 0.0;
    std::complex<double> alpha1, alpha2;
    double d1x = 0.0, d2x = 0.0; // effective detunings Delta_i^x
    double residual = 0.0;       // force-balance residual at x0
};

// cos/sin of 2*x0 and of 2*(x0 - phi); every position-dependent factor in
// the model reduces to these four numbers.
struct TrapGeometry {
    double c1, s1, c2, s2;
};

inline TrapGeometry trap_geometry(double x0, double phi) {
    return {std::cos(2.0 * x0), std::sin(2.0 * x0),
            std::cos(2.0 * (x0 - phi)), std::sin(2.0 * (x0 - phi))};
}

// Delta_1^x = Delta_1 + (1 + cos 2x0)/2,  Delta_2^x = Delta_2 + (1 + cos 2(x0-phi))/2.
// For phi = pi/4 the second reduces to Delta_2 + (1 + sin 2x0)/2.
inline std::pair<double, double> effective_detunings(double x0, const ScaledParams& p) {
    const TrapGeometry g = trap_geometry(x0, p.phase);
    return {p.delta1 + 0.5 * (1.0 + g.c1), p.delta2 + 0.5 * (1.0 + g.c2)};
}

// alpha_1 = 1/(kappa_A - i Delta_1^x), alpha_2 = R/(kappa_A - i Delta_2^x)
inline std::pair<std::complex<double>, std::complex<double>>
steady_fields(double d1x, double d2x, const ScaledParams& p) {
    const std::complex<double> a1 = 1.0 / std::complex<double>(p.kappaA, -d1x);
    const std::complex<double> a2 = p.drive_ratio / std::complex<double>(p.kappaA, -d2x);
    return {a1, a2};
}

namespace detail {

// Static force balance with the fields eliminated:
//   f(x) = |alpha1(x)|^2 sin 2x + |alpha2(x)|^2 sin 2(x - phi)
// For phi = pi/4 roots of f coincide with tan 2x0 = |alpha2|^2/|alpha1|^2.
inline double force_residual(double x, const ScaledParams& p) {
    const TrapGeometry g = trap_geometry(x, p.phase);
    const double d1x = p.delta1 + 0.5 * (1.0 + g.c1);
    const double d2x = p.delta2 + 0.5 * (1.0 + g.c2);
    const double a1sq = 1.0 / (d1x * d1x + p.kappaA * p.kappaA);
    const double a2sq = p.drive_ratio * p.drive_ratio / (d2x * d2x + p.kappaA * p.kappaA);
    return a1sq * g.s1 + a2sq * g.s2;
}

// Curvature factor |alpha1|^2 cos 2x0 + |alpha2|^2 cos 2(x0-phi);
// omega_M^2 = 2 eps^2 * curvature.  Used to rank equilibria by trap depth
// (the ordering is independent of eps2).
inline double curvature_factor(double x, const ScaledParams& p) {
    const TrapGeometry g = trap_geometry(x, p.phase);
    const double d1x = p.delta1 + 0.5 * (1.0 + g.c1);
    const double d2x = p.delta2 + 0.5 * (1.0 + g.c2);
    const double a1sq = 1.0 / (d1x * d1x + p.kappaA * p.kappaA);
    const double a2sq = p.drive_ratio * p.drive_ratio / (d2x * d2x + p.kappaA * p.kappaA);
    return a1sq * g.c1 + a2sq * g.c2;
}

inline double bisect_root(double a, double b, double fa, const ScaledParams& p) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double fm = force_residual(mid, p);
        if (fm == 0.0) return mid;
        if (fa * fm < 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    // secant polish inside the final bracket
    double x0 = a, x1 = b;
    double f0 = force_residual(x0, p), f1 = force_residual(x1, p);
    for (int i = 0; i < 3 && f1 != f0; ++i) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 >= std::min(a, b) && x2 <= std::max(a, b))) break;
        x0 = x1; f0 = f1;
        x1 = x2; f1 = force_residual(x1, p);
    }
    return std::abs(f1) < std::abs(f0) ? x1 : x0;
}

inline Equilibrium make_equilibrium(double x0, const ScaledParams& p) {
    Equilibrium eq;
    eq.x0 = x0;
    std::tie(eq.d1x, eq.d2x) = effective_detunings(x0, p);
    std::tie(eq.alpha1, eq.alpha2) = steady_fields(eq.d1x, eq.d2x, p);
    eq.residual = force_residual(x0, p);
    return eq;
}

} // namespace detail

// Ambiguous equilibrium: more than one root of the force balance.  Carries
// every candidate, deepest trap first, so callers can pick a branch.
struct AmbiguousEquilibriumError : SolverError {
    std::vector<Equilibrium> roots;
    AmbiguousEquilibriumError(const std::string& msg, std::vector<Equilibrium> r)
        : SolverError(msg), roots(std::move(r)) {}
};

// All force-balance roots on [min(0, phi - pi/2), max(pi/4, phi)], found by a
// uniform sign-change scan plus bracketed bisection, sorted deepest trap first.
inline std::vector<Equilibrium> find_equilibria(const ScaledParams& p, int scan_points = 4096) {
    p.validate();
    const double lo = std::min(0.0, p.phase - constants::pi / 2.0);
    const double hi = std::max(constants::pi / 4.0, p.phase);

    std::vector<double> roots;
    double xa = lo;
    double fa = detail::force_residual(xa, p);
    if (fa == 0.0) roots.push_back(xa);
    for (int i = 1; i <= scan_points; ++i) {
        const double xb = lo + (hi - lo) * static_cast<double>(i) / scan_points;
        const double fb = detail::force_residual(xb, p);
        if (fb == 0.0) {
            roots.push_back(xb);
        } else if (fa != 0.0 && fa * fb < 0.0) {
            roots.push_back(detail::bisect_root(xa, xb, fa, p));
        }
        xa = xb;
        fa = fb;
    }

    // merge duplicates from roots landing on scan nodes
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                roots.end());

    std::vector<Equilibrium> out;
    out.reserve(roots.size());
    for (double r : roots) out.push_back(detail::make_equilibrium(r, p));
    std::sort(out.begin(), out.end(), [&](const Equilibrium& a, const Equilibrium& b) {
        return detail::curvature_factor(a.x0, p) > detail::curvature_factor(b.x0, p);
    });
    return out;
}

// Unique self-consistent equilibrium.  Throws NoEquilibriumError if the scan
// finds no root and AmbiguousEquilibriumError (with all candidates) if it
// finds several.
inline Equilibrium solve_equilibrium(const ScaledParams& p) {
    auto roots = find_equilibria(p);
    if (roots.empty())
        throw NoEquilibriumError("no equilibrium: force balance has no root in the search interval");
    if (roots.size() > 1)
        throw AmbiguousEquilibriumError("ambiguous equilibrium: " + std::to_string(roots.size())
                                            + " force-balance roots",
                                        std::move(roots));
    return roots.front();
}

// Branch policy used by sweeps: on ambiguity take the deepest trap.
inline Equilibrium solve_equilibrium_deepest(const ScaledParams& p) {
    auto roots = find_equilibria(p);
    if (roots.empty())
        throw NoEquilibriumError("no equilibrium: force balance has no root in the search interval");
    return roots.front();
}

} // namespace selftrap
