#pragma once

#include "approx.hpp"
#include "bernstein.hpp"
#include "cone.hpp"
#include "csv.hpp"
#include "experiment.hpp"
#include "expression.hpp"
#include "kkt.hpp"
#include "lbfgs.hpp"
#include "quadrature.hpp"
#include "reference.hpp"
#include "simplex.hpp"
