#pragma once

#include "wsens/coefficient.hpp"
#include "wsens/danskin.hpp"
#include "wsens/estimate.hpp"
#include "wsens/field.hpp"
#include "wsens/grid.hpp"
#include "wsens/market.hpp"
#include "wsens/modular.hpp"
#include "wsens/paths.hpp"
#include "wsens/rng.hpp"
#include "wsens/sensitivity.hpp"
#include "wsens/solver.hpp"
#include "wsens/types.hpp"
#include "wsens/utility.hpp"
#include "wsens/valuation.hpp"
