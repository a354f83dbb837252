#pragma once

#include "larc/affine.hpp"
#include "larc/algebra.hpp"
#include "larc/errors.hpp"
#include "larc/graphcrit.hpp"
#include "larc/orbit.hpp"
#include "larc/rankcond.hpp"
#include "larc/sim.hpp"
#include "larc/state.hpp"
