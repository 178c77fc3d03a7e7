#pragma once

#include "rabin/number.hpp"
#include "rabin/state_set.hpp"
#include "rabin/game.hpp"
#include "rabin/strategy.hpp"
#include "rabin/env_mdp.hpp"
#include "rabin/graph.hpp"
#include "rabin/end_component.hpp"
#include "rabin/qualitative.hpp"
#include "rabin/linear.hpp"
#include "rabin/quantitative.hpp"
#include "rabin/synthesis.hpp"
#include "rabin/oracle.hpp"
#include "rabin/sim.hpp"
#include "rabin/io.hpp"
