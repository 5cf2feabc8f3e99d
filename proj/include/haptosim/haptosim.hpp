#pragma once

#include "haptosim/error.hpp"
#include "haptosim/format.hpp"
#include "haptosim/functions.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/model_spec.hpp"
#include "haptosim/regularization.hpp"
#include "haptosim/tridiagonal.hpp"
#include "haptosim/functionals.hpp"
#include "haptosim/pde_solver.hpp"
#include "haptosim/limit_ode.hpp"
#include "haptosim/estimates.hpp"
#include "haptosim/experiments.hpp"
