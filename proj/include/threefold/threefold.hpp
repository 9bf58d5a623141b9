#pragma once

#include "threefold/errors.hpp"
#include "threefold/rng.hpp"
#include "threefold/grid.hpp"
#include "threefold/forms.hpp"
#include "threefold/dolbeault.hpp"
#include "threefold/metrics.hpp"
#include "threefold/functionals.hpp"
#include "threefold/constants.hpp"
