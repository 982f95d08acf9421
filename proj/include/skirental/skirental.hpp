#pragma once

#include "skirental/button.hpp"
#include "skirental/claims.hpp"
#include "skirental/days.hpp"
#include "skirental/det_bound.hpp"
#include "skirental/dual.hpp"
#include "skirental/experiments.hpp"
#include "skirental/format.hpp"
#include "skirental/harness.hpp"
#include "skirental/instance.hpp"
#include "skirental/lp.hpp"
#include "skirental/opt_table.hpp"
#include "skirental/parallel.hpp"
#include "skirental/random.hpp"
#include "skirental/strategies.hpp"
