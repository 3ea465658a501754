#pragma once

#include "laguerre/lab/config.hpp"
#include "laguerre/lab/decomposition.hpp"
#include "laguerre/lab/experiment.hpp"
#include "laguerre/lab/rate.hpp"
#include "laguerre/lab/report.hpp"
