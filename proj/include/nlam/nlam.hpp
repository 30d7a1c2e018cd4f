#pragma once

#include "nlam/formula.hpp"
#include "nlam/graph.hpp"
#include "nlam/nominal.hpp"
#include "nlam/orbit.hpp"
#include "nlam/set.hpp"
#include "nlam/theory.hpp"
