#pragma once

#include "classify.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "mc_sim.hpp"
#include "numeric.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "paths.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "tilted.hpp"
#include "version.hpp"
