#pragma once

// Umbrella header: simulator and verification suite for the logarithmic
// Schrödinger equation with saturated multiplicative jump noise in canonical
// (Marcus) form.

#include "analysis.hpp"
#include "config.hpp"
#include "core.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "levy.hpp"
#include "marcus.hpp"
#include "nonlinearity.hpp"
#include "rng.hpp"
#include "solver.hpp"
