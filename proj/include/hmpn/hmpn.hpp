#pragma once

#include "hmpn/analysis.hpp"
#include "hmpn/basis.hpp"
#include "hmpn/closure.hpp"
#include "hmpn/config.hpp"
#include "hmpn/errors.hpp"
#include "hmpn/io.hpp"
#include "hmpn/pn.hpp"
#include "hmpn/problems.hpp"
#include "hmpn/quadrature.hpp"
#include "hmpn/solver.hpp"
