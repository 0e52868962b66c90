#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "selftrap/equilibrium.hpp"
#include "selftrap/linear_response.hpp"
#include "selftrap/params.hpp"

namespace selftrap {

// Dynamical state of the nonlinear scaled equations of motion.
struct SimState {
    double x = 0.0;               // scaled position kx
    double p = 0.0;               // dx/dt in scaled time
    std::complex<double> a1, a2;  // scaled field amplitudes
};

inline SimState equilibrium_state(const Equilibrium& eq) {
    return {eq.x0, 0.0, eq.alpha1, eq.alpha2};
}

// Right-hand side of the six real ODEs:
//   x''  = -eps^2 [|a1|^2 sin 2x + |a2|^2 sin 2(x - phi)]
//   a1'  = i Delta_1 a1 + 1 + i a1 cos^2 x          - kappa_A a1
//   a2'  = i Delta_2 a2 + R + i a2 cos^2 (x - phi)  - kappa_A a2
inline SimState derivative(const SimState& s, const ScaledParams& p) {
    SimState d;
    d.x = s.p;
    const double sin2x = std::sin(2.0 * s.x);
    const double sin2xp = std::sin(2.0 * (s.x - p.phase));
    d.p = -p.eps2 * (std::norm(s.a1) * sin2x + std::norm(s.a2) * sin2xp);
    const double c1 = std::cos(s.x);
    const double c2 = std::cos(s.x - p.phase);
    d.a1 = std::complex<double>(0.0, p.delta1 + c1 * c1) * s.a1 - p.kappaA * s.a1 + 1.0;
    d.a2 = std::complex<double>(0.0, p.delta2 + c2 * c2) * s.a2 - p.kappaA * s.a2
           + p.drive_ratio;
    return d;
}

// Integration control.  Adaptive mode is an embedded Dormand-Prince 5(4)
// pair; fixed mode is classical RK4 with step h.
struct StepControl {
    enum class Mode { adaptive, fixed };
    Mode mode = Mode::adaptive;
    double h = 1e-2;        // fixed step, or initial step in adaptive mode
    double rtol = 1e-9;
    double atol = 1e-12;
    int stride = 1;         // record every stride-th accepted step
    long max_steps = 50000000;

    static StepControl fixed_step(double step, int stride_ = 1) {
        StepControl c;
        c.mode = Mode::fixed;
        c.h = step;
        c.stride = stride_;
        return c;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SimState> states;
    std::vector<double> energy; // filled by attach_energy
};

namespace detail {

using Vec6 = std::array<double, 6>;

inline Vec6 pack(const SimState& s) {
    return {s.x, s.p, s.a1.real(), s.a1.imag(), s.a2.real(), s.a2.imag()};
}
inline SimState unpack(const Vec6& v) {
    return {v[0], v[1], {v[2], v[3]}, {v[4], v[5]}};
}
inline Vec6 rhs(const Vec6& v, const ScaledParams& p) {
    return pack(derivative(unpack(v), p));
}
inline bool finite(const Vec6& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec6 axpy(const Vec6& y, double h, const Vec6& k) {
    Vec6 out;
    for (int i = 0; i < 6; ++i) out[i] = y[i] + h * k[i];
    return out;
}

inline Vec6 rk4_step(const Vec6& y, double h, const ScaledParams& p) {
    const Vec6 k1 = rhs(y, p);
    const Vec6 k2 = rhs(axpy(y, 0.5 * h, k1), p);
    const Vec6 k3 = rhs(axpy(y, 0.5 * h, k2), p);
    const Vec6 k4 = rhs(axpy(y, h, k3), p);
    Vec6 out;
    for (int i = 0; i < 6; ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Dormand-Prince 5(4) tableau
struct Dopri5 {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0,
                            e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                            e4 = 125.0 / 192.0 - 393.0 / 640.0,
                            e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0,
                            e6 = 11.0 / 84.0 - 187.0 / 2100.0,
                            e7 = -1.0 / 40.0;
};

} // namespace detail

inline Trajectory integrate(const SimState& init, const ScaledParams& p, double t_end,
                            const StepControl& ctrl = {}) {
    p.validate();
    if (!(t_end > 0.0)) throw InvalidParameterError("integrate: t_end must be > 0");
    if (!(ctrl.h > 0.0)) throw InvalidParameterError("integrate: step must be > 0");

    Trajectory traj;
    detail::Vec6 y = detail::pack(init);
    double t = 0.0;
    traj.times.push_back(t);
    traj.states.push_back(init);

    long accepted = 0;
    auto record = [&](double tn, const detail::Vec6& yn, bool force) {
        ++accepted;
        if (force || accepted % ctrl.stride == 0) {
            traj.times.push_back(tn);
            traj.states.push_back(detail::unpack(yn));
        }
    };

    if (ctrl.mode == StepControl::Mode::fixed) {
        const long n = std::max(1L, static_cast<long>(std::ceil(t_end / ctrl.h - 1e-9)));
        if (n > ctrl.max_steps) throw SolverError("integrate: max step count exceeded");
        const double h = t_end / static_cast<double>(n);
        for (long i = 0; i < n; ++i) {
            y = detail::rk4_step(y, h, p);
            t = (i + 1 == n) ? t_end : (i + 1) * h;
            if (!detail::finite(y))
                throw DivergenceError("integrate: state diverged", traj.times.back());
            record(t, y, i + 1 == n);
        }
        return traj;
    }

    using D = detail::Dopri5;
    double h = std::min(ctrl.h, t_end);
    detail::Vec6 k1 = detail::rhs(y, p); // FSAL
    for (long step = 0; step < ctrl.max_steps && t < t_end; ++step) {
        if (h < 1e-12 * std::max(1.0, std::abs(t)))
            throw StiffnessError("integrate: step size underflow (stiff system?)", t);
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        const detail::Vec6 k2 = detail::rhs(detail::axpy(y, h * D::a21, k1), p);
        detail::Vec6 tmp;
        for (int i = 0; i < 6; ++i) tmp[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
        const detail::Vec6 k3 = detail::rhs(tmp, p);
        for (int i = 0; i < 6; ++i)
            tmp[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
        const detail::Vec6 k4 = detail::rhs(tmp, p);
        for (int i = 0; i < 6; ++i)
            tmp[i] = y[i]
                     + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
        const detail::Vec6 k5 = detail::rhs(tmp, p);
        for (int i = 0; i < 6; ++i)
            tmp[i] = y[i]
                     + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] + D::a64 * k4[i]
                            + D::a65 * k5[i]);
        const detail::Vec6 k6 = detail::rhs(tmp, p);
        detail::Vec6 ynew;
        for (int i = 0; i < 6; ++i)
            ynew[i] = y[i]
                      + h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] + D::b5 * k5[i]
                             + D::b6 * k6[i]);
        const detail::Vec6 k7 = detail::rhs(ynew, p);

        if (!detail::finite(ynew))
            throw DivergenceError("integrate: state diverged", t);

        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double e = h
                             * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i]
                                + D::e6 * k6[i] + D::e7 * k7[i]);
            const double sc = ctrl.atol + ctrl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 6.0);

        if (err <= 1.0) {
            t = last ? t_end : t + h;
            y = ynew;
            k1 = k7;
            record(t, y, t >= t_end);
        }
        const double factor = (err == 0.0) ? 5.0
                                           : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= factor;
    }
    if (t < t_end) throw SolverError("integrate: max step count exceeded");
    return traj;
}

// Mechanical energy E(t) = p^2/2 + omega_M^2 (x - x0)^2 / 2 about the trap.
inline void attach_energy(Trajectory& traj, double x0, double omega_m2) {
    traj.energy.resize(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const SimState& s = traj.states[i];
        const double dx = s.x - x0;
        traj.energy[i] = 0.5 * s.p * s.p + 0.5 * omega_m2 * dx * dx;
    }
}

// Decay-rate fit of a trajectory.  gamma_num is the least-squares slope of
// log E(t): energy decays as exp(Gamma t), amplitude as exp(Gamma t / 2).
struct RateFit {
    double gamma_num = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    bool truncated = false; // run-length cap hit before the requested decay time
};

struct FitOptions {
    double transient = 0.0;   // time to discard at the start
    double min_periods = 20.0;
    double min_r_squared = 0.95;
};

inline RateFit extract_rate(const Trajectory& traj, double x0, double omega_m2,
                            const FitOptions& opt = {}) {
    if (!(omega_m2 > 0.0))
        throw InvalidParameterError("extract_rate: omega_M^2 must be > 0");
    if (traj.times.size() < 4)
        throw InvalidParameterError("extract_rate: trajectory too short");
    const double w = std::sqrt(omega_m2);
    const double t_start = traj.times.front() + opt.transient;
    const double t_end = traj.times.back();
    if (t_end - t_start < opt.min_periods * 2.0 * constants::pi / w)
        throw InvalidParameterError(
            "extract_rate: window shorter than the required number of mechanical periods");

    // least squares of log E vs t
    double n = 0.0, st = 0.0, se = 0.0, stt = 0.0, ste = 0.0, see = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < t_start) continue;
        const SimState& s = traj.states[i];
        const double dx = s.x - x0;
        const double e = 0.5 * s.p * s.p + 0.5 * omega_m2 * dx * dx;
        if (!(e > 0.0)) continue;
        const double le = std::log(e);
        const double t = traj.times[i];
        n += 1.0; st += t; se += le; stt += t * t; ste += t * le; see += le * le;
    }
    if (n < 8.0) throw InvalidParameterError("extract_rate: too few samples in the fit window");

    const double denom = n * stt - st * st;
    const double slope = (n * ste - st * se) / denom;
    const double ss_tot = see - se * se / n;
    const double intercept = (se - slope * st) / n;
    const double ss_res = see - intercept * se - slope * ste;
    const double r2 = (ss_tot > 0.0) ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;

    RateFit fit;
    fit.gamma_num = slope;
    fit.r_squared = r2;
    fit.window = {t_start, t_end};
    if (r2 < opt.min_r_squared)
        throw FitRejectedError("extract_rate: envelope fit rejected (r^2 = "
                                   + std::to_string(r2) + ")",
                               r2);
    return fit;
}

inline RateFit extract_rate(const Trajectory& traj, const Equilibrium& eq,
                            const ScaledParams& p) {
    FitOptions opt;
    opt.transient = 10.0 / p.kappaA;
    return extract_rate(traj, eq.x0, mechanical_frequency_sq(eq, p), opt);
}

// One-shot numerical cooling-rate measurement at an operating point: solve
// the equilibrium, displace x by dx, integrate, fit the energy envelope.
// Run length is max(40 periods, 5/|Gamma| predicted) capped at t_cap; hitting
// the cap sets RateFit::truncated.
struct MeasureOptions {
    double dx = 0.01;
    double t_cap = 1e4;
    StepControl ctrl{};
};

struct RateMeasurement {
    RateFit fit;
    double gamma_linear = 0.0; // Eq.-(5)-style prediction at the same point
    double omega_m2 = 0.0;
    Equilibrium eq;
    Trajectory trajectory;
};

inline RateMeasurement measure_cooling_rate(const ScaledParams& p,
                                            const MeasureOptions& opt = {}) {
    RateMeasurement m;
    m.eq = solve_equilibrium_deepest(p);
    const CoolingReport rep = cooling_rate(m.eq, p);
    m.gamma_linear = rep.gamma;
    m.omega_m2 = rep.omega_m2;

    const double period = 2.0 * constants::pi / rep.omega_m;
    const double transient = 10.0 / p.kappaA;
    double t_end;
    double dx_used = opt.dx;
    if (rep.gamma < 0.0) {
        t_end = std::max(40.0 * period, 5.0 / std::max(1e-6, -rep.gamma)) + transient;
    } else {
        // heating: keep the run just long enough to fit and launch small
        // enough that the grown amplitude stays in the linear regime
        t_end = std::max(25.0 * period, 2.0 / std::max(1e-6, rep.gamma)) + transient;
        const double growth = std::exp(0.5 * rep.gamma * t_end);
        dx_used = std::clamp(0.05 / growth, 1e-5, opt.dx);
    }
    bool truncated = false;
    if (t_end > opt.t_cap) {
        t_end = opt.t_cap;
        truncated = true;
    }

    SimState init = equilibrium_state(m.eq);
    init.x += dx_used;
    m.trajectory = integrate(init, p, t_end, opt.ctrl);
    attach_energy(m.trajectory, m.eq.x0, m.omega_m2);

    FitOptions fopt;
    fopt.transient = 10.0 / p.kappaA;
    m.fit = extract_rate(m.trajectory, m.eq.x0, m.omega_m2, fopt);
    m.fit.truncated = truncated;
    return m;
}

} // namespace selftrap
