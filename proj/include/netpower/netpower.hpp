#pragma once

#include "netpower/balancing.hpp"
#include "netpower/conjugate_gradient.hpp"
#include "netpower/error.hpp"
#include "netpower/generators.hpp"
#include "netpower/graph.hpp"
#include "netpower/linear_operator.hpp"
#include "netpower/measures.hpp"
#include "netpower/stats.hpp"
#include "netpower/structure.hpp"
