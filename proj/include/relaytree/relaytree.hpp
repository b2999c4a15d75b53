#pragma once

#include "relaytree/asymptotics.hpp"
#include "relaytree/bounds.hpp"
#include "relaytree/dynamics.hpp"
#include "relaytree/error.hpp"
#include "relaytree/error_pair.hpp"
#include "relaytree/extended_prob.hpp"
#include "relaytree/montecarlo.hpp"
#include "relaytree/regions.hpp"
#include "relaytree/trajectory.hpp"
