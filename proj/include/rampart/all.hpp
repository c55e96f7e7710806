#pragma once

#include "rampart/config.hpp"
#include "rampart/data.hpp"
#include "rampart/harness.hpp"
#include "rampart/metrics.hpp"
#include "rampart/ramp.hpp"
#include "rampart/rampart.hpp"
#include "rampart/rankers.hpp"
#include "rampart/rng.hpp"
#include "rampart/sampling.hpp"
#include "rampart/synth.hpp"
