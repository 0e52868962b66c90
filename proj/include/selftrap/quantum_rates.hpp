#pragma once

#include <optional>
#include <utility>

#include "selftrap/linear_response.hpp"

namespace selftrap {

// Perturbative phonon transition-rate coefficients:
//   R_{n -> n+1} = (n+1) * up_coeff,   up_coeff   = eps^2 kappa_A / omega_M * (S1(+w) + S2(+w))
//   R_{n -> n-1} =  n    * down_coeff, down_coeff = eps^2 kappa_A / omega_M * (S1(-w) + S2(-w))
// down - up = -Gamma, and detailed balance of the birth-death chain gives
// nmin = up/(down - up) when cooling.
struct PhononRates {
    double up_coeff = 0.0;
    double down_coeff = 0.0;
    std::optional<double> nmin;
};

inline PhononRates phonon_rates(const Equilibrium& eq, const ScaledParams& p) {
    const double w2 = mechanical_frequency_sq(eq, p);
    if (!(w2 > 0.0))
        throw UnstableEquilibriumError("phonon_rates: omega_M^2 <= 0 (unstable equilibrium)");
    const double w = std::sqrt(w2);
    const auto [s1p, s2p] = spectral_weights(w, eq, p);
    const auto [s1m, s2m] = spectral_weights(-w, eq, p);
    const double pref = p.eps2 * p.kappaA / w;

    PhononRates r;
    r.up_coeff = pref * (s1p + s2p);
    r.down_coeff = pref * (s1m + s2m);
    if (r.down_coeff > r.up_coeff)
        r.nmin = r.up_coeff / (r.down_coeff - r.up_coeff);
    return r;
}

inline std::pair<double, double>
transition_rates(double n, const Equilibrium& eq, const ScaledParams& p) {
    if (!(n >= 0.0)) throw InvalidParameterError("transition_rates: n must be >= 0");
    const PhononRates r = phonon_rates(eq, p);
    return {(n + 1.0) * r.up_coeff, n * r.down_coeff};
}

// Equilibrium mean phonon number.  The printed closed form in the source
// model has numerator and denominator signs that make it negative exactly
// when the transition rates predict cooling; what is implemented here is the
// detailed-balance steady state of those rates, nmin = S(+)/(S(-) - S(+)).
inline double min_phonon(const Equilibrium& eq, const ScaledParams& p) {
    const PhononRates r = phonon_rates(eq, p);
    if (!r.nmin)
        throw NetHeatingError("min_phonon: net heating, no thermal equilibrium");
    return *r.nmin;
}

} // namespace selftrap
