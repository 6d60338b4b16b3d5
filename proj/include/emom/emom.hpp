/// Umbrella header.

#ifndef EMOM_EMOM_HPP_
#define EMOM_EMOM_HPP_

#include "emom/bench.hpp"
#include "emom/characteristics.hpp"
#include "emom/errors.hpp"
#include "emom/fvm.hpp"
#include "emom/model.hpp"
#include "emom/ode_oracle.hpp"
#include "emom/reconstruction.hpp"
#include "emom/solver.hpp"

#endif // EMOM_EMOM_HPP_
