#pragma once

#include "gbfim/baselines.hpp"
#include "gbfim/error.hpp"
#include "gbfim/gpr.hpp"
#include "gbfim/graph.hpp"
#include "gbfim/kernel.hpp"
#include "gbfim/pgreedy.hpp"
#include "gbfim/report.hpp"
#include "gbfim/spectral.hpp"
#include "gbfim/tuning.hpp"
