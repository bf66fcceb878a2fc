#pragma once

// Umbrella header.

#include "svi/analysis.hpp"
#include "svi/collocation.hpp"
#include "svi/errors.hpp"
#include "svi/integrators.hpp"
#include "svi/linalg.hpp"
#include "svi/mechanics.hpp"
#include "svi/newton.hpp"
#include "svi/serialize.hpp"
