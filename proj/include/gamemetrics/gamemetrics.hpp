#pragma once

#include "gamemetrics/errors.hpp"
#include "gamemetrics/linprog.hpp"
#include "gamemetrics/game.hpp"
#include "gamemetrics/relations.hpp"
#include "gamemetrics/matchdist.hpp"
#include "gamemetrics/metrics.hpp"
#include "gamemetrics/payoffs.hpp"
#include "gamemetrics/concurrent.hpp"
#include "gamemetrics/game_io.hpp"
#include "gamemetrics/random_games.hpp"
