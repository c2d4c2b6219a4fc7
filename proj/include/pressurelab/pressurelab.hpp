#pragma once

// Umbrella header: thermodynamic-formalism toolkit for skew-periodic
// Z-extensions of piecewise-linear expanding interval maps.

#include "pressurelab/branch_model.hpp"
#include "pressurelab/corridor.hpp"
#include "pressurelab/errors.hpp"
#include "pressurelab/escape_sim.hpp"
#include "pressurelab/fibre_pressure.hpp"
#include "pressurelab/model_io.hpp"
#include "pressurelab/parallel.hpp"
#include "pressurelab/potential.hpp"
#include "pressurelab/pressure.hpp"
#include "pressurelab/rng.hpp"
#include "pressurelab/spectrum.hpp"
#include "pressurelab/stats.hpp"
#include "pressurelab/svg.hpp"
#include "pressurelab/verify.hpp"
#include "pressurelab/word.hpp"
