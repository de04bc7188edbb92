#pragma once

#include "uavmec/allocation.hpp"
#include "uavmec/barrier_solver.hpp"
#include "uavmec/channel.hpp"
#include "uavmec/compute_model.hpp"
#include "uavmec/config.hpp"
#include "uavmec/engine.hpp"
#include "uavmec/game_context.hpp"
#include "uavmec/geometry.hpp"
#include "uavmec/lyapunov.hpp"
#include "uavmec/offload_game.hpp"
#include "uavmec/random.hpp"
#include "uavmec/results_io.hpp"
#include "uavmec/scenario.hpp"
#include "uavmec/trajectory.hpp"
#include "uavmec/verification.hpp"
