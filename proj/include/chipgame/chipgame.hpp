#pragma once

#include "chipgame/game.hpp"
#include "chipgame/layers.hpp"
#include "chipgame/montecarlo.hpp"
#include "chipgame/oracles.hpp"
#include "chipgame/solver.hpp"
#include "chipgame/threshold.hpp"
