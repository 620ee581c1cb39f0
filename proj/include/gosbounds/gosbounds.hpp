#pragma once

#include "gosbounds/error.hpp"
#include "gosbounds/params.hpp"
#include "gosbounds/numerics.hpp"
#include "gosbounds/matrix_exp.hpp"
#include "gosbounds/density.hpp"
#include "gosbounds/moments.hpp"
#include "gosbounds/extremal.hpp"
#include "gosbounds/dfr_bounds.hpp"
#include "gosbounds/dfra_bounds.hpp"
#include "gosbounds/montecarlo.hpp"
#include "gosbounds/zoo.hpp"

#define GOSBOUNDS_VERSION "0.1.0"
