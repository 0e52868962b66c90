#pragma once

#include <cmath>
#include <string>

#include "selftrap/constants.hpp"
#include "selftrap/errors.hpp"

namespace selftrap {

// Laboratory-frame parameters of the two-mode levitated-sphere trap.
// kappa is the full cavity damping; the scaled equations use kappa_A = (kappa/2)/A.
struct PhysicalParams {
    double kappa = 6e5;            // cavity damping (Hz)
    double coupling = 3e5;         // optomechanical coupling A (Hz)
    double wavelength = 1064e-9;   // drive laser wavelength (m)
    double power = 0.0;            // drive power P (W)
    double drive_ratio = 0.5;      // R, field-2/field-1 drive amplitude ratio
    double sphere_radius = 100e-9; // m
    double sphere_density = 2200.0;// kg/m^3 (fused silica default)
    double phase = constants::pi / 4; // mode dephasing phi (rad)

    double mass() const {
        return sphere_density * (4.0 / 3.0) * constants::pi
               * sphere_radius * sphere_radius * sphere_radius;
    }
    double wavenumber() const { return 2.0 * constants::pi / wavelength; }

    // E_1^2, photon-number drive amplitude squared, from P = 2 k c E_1^2 hbar / kappa
    double drive_field_sq() const {
        return power * kappa / (2.0 * wavenumber() * constants::speed_of_light * constants::hbar);
    }

    void validate() const {
        if (!(kappa > 0.0)) throw InvalidParameterError("kappa must be > 0");
        if (!(coupling > 0.0)) throw InvalidParameterError("coupling A must be > 0");
        if (!(wavelength > 0.0)) throw InvalidParameterError("wavelength must be > 0");
        if (!(power >= 0.0)) throw InvalidParameterError("power must be >= 0");
        if (!(drive_ratio >= 0.0 && drive_ratio <= 1.0))
            throw InvalidParameterError("drive_ratio must lie in [0, 1]");
        if (!(sphere_radius > 0.0)) throw InvalidParameterError("sphere_radius must be > 0");
        if (!(sphere_density > 0.0)) throw InvalidParameterError("sphere_density must be > 0");
    }
};

// Dimensionless control parameters: time in 1/A, detunings and rates in A.
struct ScaledParams {
    double eps2 = 1.0;        // scaled drive epsilon^2 = zeta E_1^2
    double delta1 = 0.0;      // Delta_1 (units of A)
    double delta2 = 0.0;      // Delta_2 (units of A)
    double kappaA = 1.0;      // (kappa/2)/A
    double drive_ratio = 0.5; // R
    double phase = constants::pi / 4;

    double eps() const { return std::sqrt(eps2); }

    void validate() const {
        if (!(eps2 >= 0.0)) throw InvalidParameterError("eps2 must be >= 0");
        if (!(kappaA > 0.0)) throw InvalidParameterError("kappaA must be > 0");
        if (!(drive_ratio >= 0.0 && drive_ratio <= 1.0))
            throw InvalidParameterError("drive_ratio must lie in [0, 1]");
    }
};

// zeta = hbar k^2 / (m A^3); epsilon^2 = zeta E_1^2
inline double drive_scale(const PhysicalParams& phys) {
    const double k = phys.wavenumber();
    const double a = phys.coupling;
    return constants::hbar * k * k / (phys.mass() * a * a * a);
}

// Exact arithmetic map from lab parameters (detunings in Hz) to scaled ones.
inline ScaledParams scale_physical(const PhysicalParams& phys, double delta1_hz, double delta2_hz) {
    phys.validate();
    ScaledParams p;
    p.eps2 = drive_scale(phys) * phys.drive_field_sq();
    p.delta1 = delta1_hz / phys.coupling;
    p.delta2 = delta2_hz / phys.coupling;
    p.kappaA = (phys.kappa / 2.0) / phys.coupling;
    p.drive_ratio = phys.drive_ratio;
    p.phase = phys.phase;
    return p;
}

// Scaled rate (units of A) back to Hz.
inline double unscale_rate(double gamma_scaled, const PhysicalParams& phys) {
    phys.validate();
    return gamma_scaled * phys.coupling;
}

} // namespace selftrap
