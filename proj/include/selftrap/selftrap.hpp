#pragma once

// Two-mode self-trapping optomechanics of a levitated nanosphere:
// scaled parameters, self-consistent equilibria, linearized cooling theory,
// closed-form resonance rates, phonon occupancy, nonlinear trajectories and
// detuning-map sweeps.

#include "selftrap/closed_forms.hpp"
#include "selftrap/config.hpp"
#include "selftrap/constants.hpp"
#include "selftrap/equilibrium.hpp"
#include "selftrap/errors.hpp"
#include "selftrap/io.hpp"
#include "selftrap/linear_response.hpp"
#include "selftrap/params.hpp"
#include "selftrap/quantum_rates.hpp"
#include "selftrap/simulator.hpp"
#include "selftrap/sweep.hpp"
