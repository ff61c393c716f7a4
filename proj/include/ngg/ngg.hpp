#pragma once

// Umbrella header for the library part (no CLI).

#include "ngg/engine.hpp"
#include "ngg/errors.hpp"
#include "ngg/harness.hpp"
#include "ngg/metrics.hpp"
#include "ngg/netgen.hpp"
#include "ngg/network.hpp"
#include "ngg/plot.hpp"
#include "ngg/population.hpp"
#include "ngg/random.hpp"
#include "ngg/simulation.hpp"
#include "ngg/stats.hpp"
#include "ngg/trace_io.hpp"
