#pragma once

// Umbrella header for the whole library.

#include "sepec/core.hpp"
#include "sepec/csv.hpp"
#include "sepec/designers.hpp"
#include "sepec/error.hpp"
#include "sepec/estimators.hpp"
#include "sepec/json_io.hpp"
#include "sepec/linalg.hpp"
#include "sepec/opt/cutting_plane.hpp"
#include "sepec/opt/frank_wolfe.hpp"
#include "sepec/opt/ipw_dual.hpp"
#include "sepec/opt/lp.hpp"
#include "sepec/opt/objectives.hpp"
#include "sepec/opt/polytope.hpp"
#include "sepec/opt/waterfill.hpp"
#include "sepec/problem.hpp"
#include "sepec/random.hpp"
#include "sepec/regions.hpp"
#include "sepec/sim.hpp"
#include "sepec/stats.hpp"
#include "sepec/svg.hpp"
#include "sepec/verify.hpp"
