#pragma once

#include "satrelay/config.hpp"
#include "satrelay/delay.hpp"
#include "satrelay/distributions.hpp"
#include "satrelay/experiments.hpp"
#include "satrelay/geometry.hpp"
#include "satrelay/link_budget.hpp"
#include "satrelay/montecarlo.hpp"
#include "satrelay/quadrature.hpp"
#include "satrelay/rng.hpp"
#include "satrelay/stats.hpp"
