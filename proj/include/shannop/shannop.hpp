#pragma once

#include "shannop/bands.hpp"
#include "shannop/error.hpp"
#include "shannop/field_io.hpp"
#include "shannop/fields.hpp"
#include "shannop/grid.hpp"
#include "shannop/precond.hpp"
#include "shannop/solver.hpp"
#include "shannop/spectral.hpp"
#include "shannop/symbol_parser.hpp"
#include "shannop/symbols.hpp"
