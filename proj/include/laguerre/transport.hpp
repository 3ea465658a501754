#pragma once

#include "laguerre/transport/assignment.hpp"
#include "laguerre/transport/cost.hpp"
#include "laguerre/transport/exact.hpp"
#include "laguerre/transport/measure.hpp"
#include "laguerre/transport/network_simplex.hpp"
#include "laguerre/transport/proxy.hpp"
#include "laguerre/transport/quantile.hpp"
#include "laguerre/transport/sinkhorn.hpp"
