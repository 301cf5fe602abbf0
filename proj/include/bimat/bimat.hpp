#pragma once

#include "bimat/bimatrix.hpp"
#include "bimat/errors.hpp"
#include "bimat/linalg.hpp"
#include "bimat/pole_assignment.hpp"
#include "bimat/poly.hpp"
#include "bimat/rendezvous.hpp"
#include "bimat/solvers.hpp"
#include "bimat/system.hpp"
#include "bimat/types.hpp"
