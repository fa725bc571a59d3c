#pragma once

// Umbrella header.

#include "latticemc/config.hpp"
#include "latticemc/dynamics.hpp"
#include "latticemc/ensemble.hpp"
#include "latticemc/errors.hpp"
#include "latticemc/field.hpp"
#include "latticemc/geometry.hpp"
#include "latticemc/io.hpp"
#include "latticemc/observables/bunching.hpp"
#include "latticemc/observables/diffusion.hpp"
#include "latticemc/observables/kinetic.hpp"
#include "latticemc/observables/peak.hpp"
#include "latticemc/observables/spectrum.hpp"
#include "latticemc/pipeline.hpp"
#include "latticemc/rng.hpp"
#include "latticemc/runspec.hpp"
#include "latticemc/stats.hpp"
#include "latticemc/trig.hpp"
#include "latticemc/vec2.hpp"
#include "latticemc/version.hpp"
