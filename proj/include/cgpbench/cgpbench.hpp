#pragma once

#include "cgpbench/cgp.hpp"
#include "cgpbench/evolution.hpp"
#include "cgpbench/experiment.hpp"
#include "cgpbench/function_set.hpp"
#include "cgpbench/hpo.hpp"
#include "cgpbench/operators.hpp"
#include "cgpbench/regression.hpp"
#include "cgpbench/report.hpp"
#include "cgpbench/rng.hpp"
#include "cgpbench/stats.hpp"
#include "cgpbench/version.hpp"
