#pragma once

#include "battery.hpp"
#include "billing.hpp"
#include "core.hpp"
#include "demand.hpp"
#include "dqn.hpp"
#include "environment.hpp"
#include "policies.hpp"
#include "qnetwork.hpp"
#include "renewables.hpp"
#include "replay_buffer.hpp"
#include "scenario.hpp"
#include "toy_mdp.hpp"
