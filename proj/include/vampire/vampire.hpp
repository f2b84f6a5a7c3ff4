#pragma once

// Everything: trace, state replay, Eq. 2 model, profiles, energy engine,
// reference models and encodings.

#include "vampire/baselines.hpp"
#include "vampire/bits.hpp"
#include "vampire/common.hpp"
#include "vampire/datadep.hpp"
#include "vampire/dram_state.hpp"
#include "vampire/encoding.hpp"
#include "vampire/energy.hpp"
#include "vampire/profiles.hpp"
#include "vampire/regression.hpp"
#include "vampire/timing.hpp"
#include "vampire/trace.hpp"
#include "vampire/variation.hpp"
